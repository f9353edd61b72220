//! Exact constrained triangulation of points inside one triangle.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::exact::{ExactPoint, Projection};
use crate::predicates::Sign;

struct Cdt<'a> {
    p: &'a [&'a ExactPoint],
    proj: Projection,
    tris: Vec<[usize; 3]>,
    edges: HashMap<(usize, usize), usize>,
}

impl<'a> Cdt<'a> {
    fn orient(&self, a: usize, b: usize, c: usize) -> Sign {
        self.proj.orient2d(self.p[a], self.p[b], self.p[c])
    }

    fn set(&mut self, t: usize, v: [usize; 3]) {
        let old = self.tris[t];
        for k in 0..3 {
            let e = (old[k], old[(k + 1) % 3]);
            if self.edges.get(&e) == Some(&t) {
                self.edges.remove(&e);
            }
        }
        self.tris[t] = v;
        for k in 0..3 {
            self.edges.insert((v[k], v[(k + 1) % 3]), t);
        }
    }

    fn push(&mut self, v: [usize; 3]) {
        let t = self.tris.len();
        self.tris.push(v);
        for k in 0..3 {
            self.edges.insert((v[k], v[(k + 1) % 3]), t);
        }
    }

    /// Triangle `t` rotated so that it starts with the directed edge `a → b`.
    fn third(&self, t: usize, a: usize, b: usize) -> usize {
        let v = self.tris[t];
        let k = (0..3)
            .find(|&k| v[k] == a && v[(k + 1) % 3] == b)
            .expect("edge in triangle");
        v[(k + 2) % 3]
    }

    fn insert(&mut self, k: usize) -> Result<()> {
        for t in 0..self.tris.len() {
            let [a, b, c] = self.tris[t];
            let s = [self.orient(a, b, k), self.orient(b, c, k), self.orient(c, a, k)];
            if s.contains(&Sign::Negative) {
                continue;
            }
            let zeros: Vec<usize> = (0..3).filter(|&i| s[i] == Sign::Zero).collect();
            match zeros.len() {
                0 => {
                    self.set(t, [a, b, k]);
                    self.push([b, c, k]);
                    self.push([c, a, k]);
                }
                1 => {
                    let v = self.tris[t];
                    let i = zeros[0];
                    let (a, b, c) = (v[i], v[(i + 1) % 3], v[(i + 2) % 3]);
                    let n = self.edges.get(&(b, a)).copied();
                    self.set(t, [a, k, c]);
                    self.push([k, b, c]);
                    if let Some(n) = n {
                        let d = self.third(n, b, a);
                        self.set(n, [b, k, d]);
                        self.push([k, a, d]);
                    }
                }
                // Coincides with an existing vertex.
                _ => {}
            }
            return Ok(());
        }
        Err(Error::InvalidInput("arrangement point outside its triangle".into()))
    }

    fn flip(&mut self, a: usize, b: usize) {
        let t1 = self.edges[&(a, b)];
        let t2 = self.edges[&(b, a)];
        let c = self.third(t1, a, b);
        let d = self.third(t2, b, a);
        self.set(t1, [c, a, d]);
        self.set(t2, [d, b, c]);
    }

    fn crosses(&self, u: usize, v: usize, x: usize, y: usize) -> bool {
        let (a, b) = (self.orient(u, v, x), self.orient(u, v, y));
        let (c, d) = (self.orient(x, y, u), self.orient(x, y, v));
        a != Sign::Zero && b == a.flip() && c != Sign::Zero && d == c.flip()
    }

    fn recover(&mut self, u: usize, v: usize) -> Result<()> {
        if self.edges.contains_key(&(u, v)) || self.edges.contains_key(&(v, u)) {
            return Ok(());
        }
        let mut crossing: Vec<(usize, usize)> = self
            .edges
            .keys()
            .filter(|&&(x, y)| x < y && self.edges.contains_key(&(y, x)))
            .filter(|&&(x, y)| self.crosses(u, v, x, y))
            .copied()
            .collect();
        crossing.sort_unstable();
        let mut queue: VecDeque<(usize, usize)> = crossing.into();
        let mut budget = 64 * (queue.len() + 4) * (queue.len() + 4);
        while let Some((x, y)) = queue.pop_front() {
            budget = budget.saturating_sub(1);
            if budget == 0 {
                return Err(Error::InvalidInput(
                    "constraint recovery did not converge (inputs self-intersect?)".into(),
                ));
            }
            let (Some(&t1), Some(&t2)) = (self.edges.get(&(x, y)), self.edges.get(&(y, x))) else {
                continue;
            };
            let c = self.third(t1, x, y);
            let d = self.third(t2, y, x);
            let (sx, sy) = (self.orient(c, d, x), self.orient(c, d, y));
            if sx == Sign::Zero || sy != sx.flip() {
                queue.push_back((x, y));
                continue;
            }
            self.flip(x, y);
            if self.crosses(u, v, c, d) {
                queue.push_back((c.min(d), c.max(d)));
            }
        }
        if self.edges.contains_key(&(u, v)) || self.edges.contains_key(&(v, u)) {
            Ok(())
        } else {
            Err(Error::InvalidInput("constraint could not be recovered".into()))
        }
    }

    fn delaunay(&mut self, fixed: &BTreeSet<[usize; 2]>) {
        let mut stack: Vec<(usize, usize)> = self
            .edges
            .keys()
            .filter(|&&(x, y)| x < y && self.edges.contains_key(&(y, x)))
            .copied()
            .collect();
        stack.sort_unstable();
        let mut budget = 1000 * (stack.len() + 1);
        while let Some((a, b)) = stack.pop() {
            if fixed.contains(&[a.min(b), a.max(b)]) {
                continue;
            }
            let (Some(&t1), Some(&t2)) = (self.edges.get(&(a, b)), self.edges.get(&(b, a))) else {
                continue;
            };
            let c = self.third(t1, a, b);
            let d = self.third(t2, b, a);
            if self.proj.incircle(self.p[a], self.p[b], self.p[c], self.p[d]) == Sign::Positive {
                self.flip(a, b);
                stack.extend([(a, d), (d, b), (b, c), (c, a)]);
                budget = budget.saturating_sub(1);
                if budget == 0 {
                    return;
                }
            }
        }
    }
}

/// Triangulates `points` (the first three are the outer corners, counter-
/// clockwise in `proj`) so that every constraint is an edge. The constraints
/// must not contain points in their interiors and must not cross each other.
/// Returns counter-clockwise local triangles.
pub(crate) fn triangulate(
    points: &[&ExactPoint],
    constraints: &[[usize; 2]],
    proj: Projection,
) -> Result<Vec<[usize; 3]>> {
    let mut cdt = Cdt {
        p: points,
        proj,
        tris: Vec::new(),
        edges: HashMap::new(),
    };
    cdt.push([0, 1, 2]);
    for k in 3..points.len() {
        cdt.insert(k)?;
    }
    let fixed: BTreeSet<[usize; 2]> = constraints.iter().map(|&[a, b]| [a.min(b), a.max(b)]).collect();
    for &[u, v] in &fixed {
        cdt.recover(u, v)?;
    }
    cdt.delaunay(&fixed);
    Ok(cdt.tris)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point3;

    fn ep(x: f64, y: f64) -> ExactPoint {
        Point3::new(x, y, 0.0).into()
    }

    fn area(pts: &[ExactPoint], tris: &[[usize; 3]]) -> f64 {
        tris.iter()
            .map(|t| {
                let (a, b, c) = (pts[t[0]].approx(), pts[t[1]].approx(), pts[t[2]].approx());
                ((b - a).cross(c - a)).z / 2.0
            })
            .sum()
    }

    #[test]
    fn points_and_constraints() {
        let pts = vec![
            ep(0.0, 0.0),
            ep(4.0, 0.0),
            ep(0.0, 4.0),
            ep(1.0, 1.0),
            ep(2.0, 0.0),
            ep(0.5, 2.5),
            ep(2.0, 2.0),
        ];
        let refs: Vec<&ExactPoint> = pts.iter().collect();
        let proj = Projection {
            drop: 2,
            flipped: false,
        };
        let cons = [[3, 5], [4, 3], [6, 5]];
        let tris = triangulate(&refs, &cons, proj).unwrap();
        assert!((area(&pts, &tris) - 8.0).abs() < 1e-12);
        for t in &tris {
            assert_eq!(proj.orient2d(refs[t[0]], refs[t[1]], refs[t[2]]), Sign::Positive);
        }
        let has = |a: usize, b: usize| tris.iter().any(|t| (0..3).any(|k| t[k] == a && t[(k + 1) % 3] == b));
        for [a, b] in cons {
            assert!(has(a, b) || has(b, a));
        }
    }
}
