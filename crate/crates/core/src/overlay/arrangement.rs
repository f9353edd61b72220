//! Exact planar arrangement of line segments and its bounded faces.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use num_traits::{Signed, Zero};

use crate::exact::Rational;
use crate::predicates::Sign;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct P2 {
    pub x: Rational,
    pub y: Rational,
}

impl P2 {
    pub fn from_f64(p: [f64; 2]) -> P2 {
        P2 {
            x: Rational::from_float(p[0]).expect("finite coordinate"),
            y: Rational::from_float(p[1]).expect("finite coordinate"),
        }
    }

    pub fn approx(&self) -> [f64; 2] {
        use num_traits::ToPrimitive;
        [self.x.to_f64().unwrap_or(f64::NAN), self.y.to_f64().unwrap_or(f64::NAN)]
    }
}

fn sign(v: &Rational) -> Sign {
    if v.is_positive() {
        Sign::Positive
    } else if v.is_negative() {
        Sign::Negative
    } else {
        Sign::Zero
    }
}

fn cross(ax: &Rational, ay: &Rational, bx: &Rational, by: &Rational) -> Rational {
    ax * by - ay * bx
}

pub(crate) fn orient(a: &P2, b: &P2, c: &P2) -> Sign {
    sign(&cross(&(&b.x - &a.x), &(&b.y - &a.y), &(&c.x - &a.x), &(&c.y - &a.y)))
}

/// `p` on the closed segment `ab`, given that the three are collinear.
fn within(p: &P2, a: &P2, b: &P2) -> bool {
    a.x.clone().min(b.x.clone()) <= p.x
        && p.x <= a.x.clone().max(b.x.clone())
        && a.y.clone().min(b.y.clone()) <= p.y
        && p.y <= a.y.clone().max(b.y.clone())
}

pub(crate) fn on_segment(p: &P2, a: &P2, b: &P2) -> bool {
    orient(a, b, p) == Sign::Zero && within(p, a, b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Inside {
    In,
    On,
    Out,
}

/// Exact point-in-ring test (crossing number).
pub(crate) fn locate_in_ring(q: &P2, ring: &[P2]) -> Inside {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (&ring[i], &ring[(i + 1) % n]);
        if on_segment(q, a, b) {
            return Inside::On;
        }
        if (a.y > q.y) != (b.y > q.y) {
            let o = orient(a, b, q);
            if (b.y > a.y && o == Sign::Positive) || (b.y < a.y && o == Sign::Negative) {
                inside = !inside;
            }
        }
    }
    if inside {
        Inside::In
    } else {
        Inside::Out
    }
}

/// Twice the signed area of a ring.
pub(crate) fn area2(ring: &[P2]) -> Rational {
    let n = ring.len();
    (0..n).fold(Rational::zero(), |s, i| {
        let (a, b) = (&ring[i], &ring[(i + 1) % n]);
        s + cross(&a.x, &a.y, &b.x, &b.y)
    })
}

/// A bounded face: outer cycle (counter-clockwise), hole cycles (clockwise)
/// and a point strictly inside it.
#[derive(Debug, Clone)]
pub(crate) struct Face {
    pub outer: Vec<usize>,
    pub holes: Vec<Vec<usize>>,
    pub sample: P2,
}

#[derive(Debug, Default)]
pub(crate) struct Arrangement2 {
    pub points: Vec<P2>,
    pub faces: Vec<Face>,
}

#[cfg(test)]
impl Arrangement2 {
    pub fn ring(&self, ids: &[usize]) -> Vec<P2> {
        ids.iter().map(|&i| self.points[i].clone()).collect()
    }
}

/// Splits every segment at every point where it meets another one.
fn split_points(segs: &[(P2, P2)], boxes: &[[f64; 4]]) -> Vec<Vec<P2>> {
    let mut extra: Vec<Vec<P2>> = vec![Vec::new(); segs.len()];
    let mut order: Vec<usize> = (0..segs.len()).collect();
    order.sort_by(|&i, &j| boxes[i][0].total_cmp(&boxes[j][0]).then(i.cmp(&j)));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if boxes[j][0] > boxes[i][2] {
                break;
            }
            if boxes[j][1] > boxes[i][3] || boxes[i][1] > boxes[j][3] {
                continue;
            }
            let ((a, b), (c, d)) = (&segs[i], &segs[j]);
            let o1 = orient(a, b, c);
            let o2 = orient(a, b, d);
            let o3 = orient(c, d, a);
            let o4 = orient(c, d, b);
            if o1 == Sign::Zero && o2 == Sign::Zero {
                for p in [c, d] {
                    if within(p, a, b) {
                        extra[i].push(p.clone());
                    }
                }
                for p in [a, b] {
                    if within(p, c, d) {
                        extra[j].push(p.clone());
                    }
                }
                continue;
            }
            if o1 != Sign::Zero && o2 == o1.flip() && o3 != Sign::Zero && o4 == o3.flip() {
                let (ex, ey) = (&b.x - &a.x, &b.y - &a.y);
                let (fx, fy) = (&d.x - &c.x, &d.y - &c.y);
                let t = cross(&(&c.x - &a.x), &(&c.y - &a.y), &fx, &fy) / cross(&ex, &ey, &fx, &fy);
                let p = P2 {
                    x: &a.x + &ex * &t,
                    y: &a.y + &ey * &t,
                };
                extra[i].push(p.clone());
                extra[j].push(p);
                continue;
            }
            if o1 == Sign::Zero && within(c, a, b) {
                extra[i].push(c.clone());
            }
            if o2 == Sign::Zero && within(d, a, b) {
                extra[i].push(d.clone());
            }
            if o3 == Sign::Zero && within(a, c, d) {
                extra[j].push(a.clone());
            }
            if o4 == Sign::Zero && within(b, c, d) {
                extra[j].push(b.clone());
            }
        }
    }
    extra
}

fn half(dx: &Rational, dy: &Rational) -> u8 {
    if dy.is_positive() || (dy.is_zero() && dx.is_positive()) {
        0
    } else {
        1
    }
}

/// Counter-clockwise angular order of direction vectors starting at +x.
fn angle_cmp(a: &(Rational, Rational), b: &(Rational, Rational)) -> Ordering {
    half(&a.0, &a.1)
        .cmp(&half(&b.0, &b.1))
        .then_with(|| match sign(&cross(&a.0, &a.1, &b.0, &b.1)) {
            Sign::Positive => Ordering::Less,
            Sign::Negative => Ordering::Greater,
            Sign::Zero => Ordering::Equal,
        })
}

/// Builds the arrangement of the given segments (zero-length ones ignored).
pub(crate) fn build(input: &[([f64; 2], [f64; 2])]) -> Arrangement2 {
    let segs: Vec<(P2, P2)> = input
        .iter()
        .filter(|(a, b)| a != b)
        .map(|&(a, b)| (P2::from_f64(a), P2::from_f64(b)))
        .collect();
    let boxes: Vec<[f64; 4]> = input
        .iter()
        .filter(|(a, b)| a != b)
        .map(|(a, b)| [a[0].min(b[0]), a[1].min(b[1]), a[0].max(b[0]), a[1].max(b[1])])
        .collect();
    let extra = split_points(&segs, &boxes);

    let mut points: Vec<P2> = Vec::new();
    let mut ids: HashMap<P2, usize> = HashMap::new();
    let mut intern = |p: &P2, points: &mut Vec<P2>| {
        *ids.entry(p.clone()).or_insert_with(|| {
            points.push(p.clone());
            points.len() - 1
        })
    };
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for ((a, b), more) in segs.iter().zip(extra) {
        let horizontal = (&b.x - &a.x).abs() >= (&b.y - &a.y).abs();
        let key = |p: &P2| if horizontal { p.x.clone() } else { p.y.clone() };
        let mut chain: Vec<P2> = more;
        chain.push(a.clone());
        chain.push(b.clone());
        chain.sort_by_key(|p| key(p));
        chain.dedup();
        let ix: Vec<usize> = chain.iter().map(|p| intern(p, &mut points)).collect();
        for w in ix.windows(2) {
            if w[0] != w[1] {
                edges.insert((w[0].min(w[1]), w[0].max(w[1])));
            }
        }
    }
    let edges: Vec<(usize, usize)> = edges.into_iter().collect();

    // Half-edge 2e runs u → v, 2e + 1 runs v → u.
    let origin = |h: usize| if h % 2 == 0 { edges[h / 2].0 } else { edges[h / 2].1 };
    let dest = |h: usize| origin(h ^ 1);
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for h in 0..2 * edges.len() {
        out[origin(h)].push(h);
    }
    let mut pos = vec![0usize; 2 * edges.len()];
    for (v, list) in out.iter_mut().enumerate() {
        let dir = |h: usize| {
            let w = &points[dest(h)];
            (&w.x - &points[v].x, &w.y - &points[v].y)
        };
        list.sort_by(|&g, &h| angle_cmp(&dir(g), &dir(h)));
        for (k, &h) in list.iter().enumerate() {
            pos[h] = k;
        }
    }
    let next = |h: usize| {
        let t = h ^ 1;
        let list = &out[origin(t)];
        list[(pos[t] + list.len() - 1) % list.len()]
    };

    let mut seen = vec![false; 2 * edges.len()];
    let mut positive: Vec<(Vec<usize>, Rational)> = Vec::new();
    let mut negative: Vec<Vec<usize>> = Vec::new();
    for h0 in 0..2 * edges.len() {
        if seen[h0] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut h = h0;
        while !seen[h] {
            seen[h] = true;
            cycle.push(origin(h));
            h = next(h);
        }
        let ring: Vec<P2> = cycle.iter().map(|&i| points[i].clone()).collect();
        let a = area2(&ring);
        if a.is_positive() {
            positive.push((cycle, a));
        } else {
            negative.push(cycle);
        }
    }

    let mut holes: Vec<Vec<Vec<usize>>> = vec![Vec::new(); positive.len()];
    for cycle in negative {
        let q = &points[cycle[0]];
        let mut best: Option<usize> = None;
        for (k, (outer, a)) in positive.iter().enumerate() {
            if best.is_some_and(|b| positive[b].1 <= *a) {
                continue;
            }
            let ring: Vec<P2> = outer.iter().map(|&i| points[i].clone()).collect();
            if locate_in_ring(q, &ring) == Inside::In {
                best = Some(k);
            }
        }
        if let Some(b) = best {
            holes[b].push(cycle);
        }
    }
    let faces = positive
        .into_iter()
        .zip(holes)
        .map(|((outer, _), holes)| {
            let sample = interior_point(&points, &outer, &holes);
            Face { outer, holes, sample }
        })
        .collect();
    Arrangement2 { points, faces }
}

/// A point strictly inside a face, on a scanline between two vertex heights.
fn interior_point(points: &[P2], outer: &[usize], holes: &[Vec<usize>]) -> P2 {
    let rings: Vec<&[usize]> = std::iter::once(outer)
        .chain(holes.iter().map(|h| h.as_slice()))
        .collect();
    let mut ys: Vec<&Rational> = rings.iter().flat_map(|r| r.iter().map(|&i| &points[i].y)).collect();
    ys.sort();
    ys.dedup();
    let y = (ys[0] + ys[1]) / Rational::from_integer(2.into());
    let mut xs: Vec<Rational> = Vec::new();
    for r in &rings {
        for k in 0..r.len() {
            let (a, b) = (&points[r[k]], &points[r[(k + 1) % r.len()]]);
            if (a.y > y) != (b.y > y) {
                xs.push(&a.x + (&y - &a.y) * (&b.x - &a.x) / (&b.y - &a.y));
            }
        }
    }
    xs.sort();
    P2 {
        x: (&xs[0] + &xs[1]) / Rational::from_integer(2.into()),
        y,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(x0: f64, y0: f64, s: f64) -> Vec<([f64; 2], [f64; 2])> {
        let p = [[x0, y0], [x0 + s, y0], [x0 + s, y0 + s], [x0, y0 + s]];
        (0..4).map(|i| (p[i], p[(i + 1) % 4])).collect()
    }

    fn area(a: &Arrangement2, f: &Face) -> f64 {
        use num_traits::ToPrimitive;
        let mut s = area2(&a.ring(&f.outer));
        for h in &f.holes {
            s += area2(&a.ring(h));
        }
        s.to_f64().unwrap() / 2.0
    }

    #[test]
    fn offset_squares() {
        let mut segs = square(0.0, 0.0, 1.0);
        segs.extend(square(0.5, 0.0, 1.0));
        let a = build(&segs);
        let mut areas: Vec<f64> = a.faces.iter().map(|f| area(&a, f)).collect();
        areas.sort_by(f64::total_cmp);
        assert_eq!(areas, vec![0.5, 0.5, 0.5]);
    }

    #[test]
    fn nested_square_is_hole() {
        let mut segs = square(0.0, 0.0, 4.0);
        segs.extend(square(1.0, 1.0, 1.0));
        let a = build(&segs);
        assert_eq!(a.faces.len(), 2);
        let big = a.faces.iter().find(|f| !f.holes.is_empty()).unwrap();
        assert_eq!(area(&a, big), 15.0);
        for f in &a.faces {
            let mut rings = vec![a.ring(&f.outer)];
            assert_eq!(locate_in_ring(&f.sample, &rings[0]), Inside::In);
            rings.extend(f.holes.iter().map(|h| a.ring(h)));
            for h in &rings[1..] {
                assert_eq!(locate_in_ring(&f.sample, h), Inside::Out);
            }
        }
    }

    #[test]
    fn crossing_diagonals() {
        let segs = vec![
            ([0.0, 0.0], [2.0, 2.0]),
            ([0.0, 2.0], [2.0, 0.0]),
            ([0.0, 0.0], [2.0, 0.0]),
            ([2.0, 0.0], [2.0, 2.0]),
            ([2.0, 2.0], [0.0, 2.0]),
            ([0.0, 2.0], [0.0, 0.0]),
        ];
        let a = build(&segs);
        assert_eq!(a.faces.len(), 4);
        assert!(a.faces.iter().all(|f| area(&a, f) == 1.0));
    }
}
