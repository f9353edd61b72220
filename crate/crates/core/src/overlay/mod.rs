//! Overlay of 2D attribute layers.
//!
//! All region boundaries are cut against each other exactly; every bounded
//! face of the resulting planar partition that some region covers becomes a
//! cell carrying the attributes of each covering region, prefixed by the
//! name of its layer.

mod arrangement;
mod json;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::predicates::{orient2d, Sign};
use arrangement::{locate_in_ring, Inside, P2};

pub use json::{layer_from_json, layer_to_json, result_to_json};

/// An attribute value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AttrValue {
    Number(f64),
    Text(String),
    Category { category: String },
}

impl AttrValue {
    pub fn label(&self) -> String {
        match self {
            AttrValue::Number(v) => format!("{v}"),
            AttrValue::Text(s) => s.clone(),
            AttrValue::Category { category } => category.clone(),
        }
    }
}

pub type AttributeRecord = BTreeMap<String, AttrValue>;

/// A polygon with holes. The outer ring is counter-clockwise, holes are
/// clockwise; rings are open (the first vertex is not repeated).
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub outer: Vec<[f64; 2]>,
    pub holes: Vec<Vec<[f64; 2]>>,
}

pub fn ring_area(ring: &[[f64; 2]]) -> f64 {
    let n = ring.len();
    (0..n)
        .map(|i| {
            let (a, b) = (ring[i], ring[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        / 2.0
}

impl Polygon {
    pub fn new(outer: Vec<[f64; 2]>, holes: Vec<Vec<[f64; 2]>>) -> Polygon {
        let orient = |mut r: Vec<[f64; 2]>, ccw: bool| {
            if r.len() > 1 && r.first() == r.last() {
                r.pop();
            }
            if (ring_area(&r) > 0.0) != ccw {
                r.reverse();
            }
            r
        };
        Polygon {
            outer: orient(outer, true),
            holes: holes.into_iter().map(|h| orient(h, false)).collect(),
        }
    }

    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Polygon {
        Polygon::new(vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]], Vec::new())
    }

    pub fn area(&self) -> f64 {
        ring_area(&self.outer) + self.holes.iter().map(|h| ring_area(h)).sum::<f64>()
    }

    fn rings(&self) -> impl Iterator<Item = &Vec<[f64; 2]>> {
        std::iter::once(&self.outer).chain(self.holes.iter())
    }

    fn bbox(&self) -> [f64; 4] {
        self.outer.iter().fold(
            [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY],
            |b, p| [b[0].min(p[0]), b[1].min(p[1]), b[2].max(p[0]), b[3].max(p[1])],
        )
    }

    fn locate(&self, q: &P2) -> Inside {
        let exact = |r: &Vec<[f64; 2]>| r.iter().map(|&p| P2::from_f64(p)).collect::<Vec<_>>();
        match locate_in_ring(q, &exact(&self.outer)) {
            Inside::In => {}
            other => return other,
        }
        for h in &self.holes {
            match locate_in_ring(q, &exact(h)) {
                Inside::Out => {}
                Inside::On => return Inside::On,
                Inside::In => return Inside::Out,
            }
        }
        Inside::In
    }

    /// Rings with at least three vertices, finite coordinates, nonzero area
    /// and no self-intersections.
    pub fn check(&self) -> std::result::Result<(), String> {
        for r in self.rings() {
            if r.len() < 3 {
                return Err("ring has fewer than 3 vertices".into());
            }
            if r.iter().flatten().any(|v| !v.is_finite()) {
                return Err("non-finite coordinate".into());
            }
            if ring_area(r) == 0.0 {
                return Err("ring has zero area".into());
            }
            if !ring_is_simple(r) {
                return Err("ring self-intersects".into());
            }
        }
        Ok(())
    }
}

fn o2(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Sign {
    orient2d(a, b, c)
}

fn segments_touch(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let (s1, s2, s3, s4) = (o2(a, b, c), o2(a, b, d), o2(c, d, a), o2(c, d, b));
    let within = |p: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        a[0].min(b[0]) <= p[0] && p[0] <= a[0].max(b[0]) && a[1].min(b[1]) <= p[1] && p[1] <= a[1].max(b[1])
    };
    if s1 != s2 && s3 != s4 && s1 != Sign::Zero && s2 != Sign::Zero && s3 != Sign::Zero && s4 != Sign::Zero {
        return true;
    }
    (s1 == Sign::Zero && within(c, a, b))
        || (s2 == Sign::Zero && within(d, a, b))
        || (s3 == Sign::Zero && within(a, c, d))
        || (s4 == Sign::Zero && within(b, c, d))
}

fn ring_is_simple(r: &[[f64; 2]]) -> bool {
    let n = r.len();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (r[i], r[(i + 1) % n]);
            let (c, d) = (r[j], r[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Neighbours may only share their common vertex.
                let (shared, other_a, other_b) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                if o2(other_a, shared, other_b) == Sign::Zero {
                    let back = (other_a[0] - shared[0]) * (other_b[0] - shared[0])
                        + (other_a[1] - shared[1]) * (other_b[1] - shared[1]);
                    if back > 0.0 {
                        return false;
                    }
                }
                continue;
            }
            if segments_touch(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub polygon: Polygon,
    pub attributes: AttributeRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub name: String,
    pub crs: String,
    pub regions: Vec<Region>,
}

impl Layer {
    pub fn new(name: impl Into<String>, crs: impl Into<String>) -> Layer {
        Layer {
            name: name.into(),
            crs: crs.into(),
            regions: Vec::new(),
        }
    }

    pub fn with_region(mut self, polygon: Polygon, attributes: AttributeRecord) -> Layer {
        self.regions.push(Region { polygon, attributes });
        self
    }

    pub fn area(&self) -> f64 {
        self.regions.iter().map(|r| r.polygon.area()).sum()
    }
}

/// One face of the overlay partition.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub polygon: Polygon,
    /// Per input layer, the index of the covering region.
    pub provenance: Vec<Option<usize>>,
    pub attributes: AttributeRecord,
}

impl Cell {
    pub fn area(&self) -> f64 {
        self.polygon.area()
    }

    /// Whether every listed layer covers this cell.
    pub fn covered_by(&self, result: &OverlayResult, layers: &[&str]) -> bool {
        layers.iter().all(|l| {
            result
                .layers
                .iter()
                .position(|n| n == l)
                .is_some_and(|k| self.provenance[k].is_some())
        })
    }

    /// Names of the covering layers joined by `+`.
    pub fn coverage(&self, result: &OverlayResult) -> String {
        result
            .layers
            .iter()
            .zip(&self.provenance)
            .filter(|(_, p)| p.is_some())
            .map(|(n, _)| n.as_str())
            .collect::<Vec<_>>()
            .join("+")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlayResult {
    pub crs: String,
    pub layers: Vec<String>,
    pub cells: Vec<Cell>,
}

impl OverlayResult {
    pub fn area(&self) -> f64 {
        self.cells.iter().map(|c| c.area()).sum()
    }
}

fn polygon_from(arr: &arrangement::Arrangement2, f: &arrangement::Face) -> Polygon {
    let ring = |ids: &[usize]| ids.iter().map(|&i| arr.points[i].approx()).collect::<Vec<_>>();
    Polygon {
        outer: ring(&f.outer),
        holes: f.holes.iter().map(|h| ring(h)).collect(),
    }
}

fn check_layers(layers: &[Layer]) -> Result<()> {
    if layers.len() < 2 {
        return Err(Error::InvalidInput("overlay needs at least two layers".into()));
    }
    let crs = &layers[0].crs;
    for (k, l) in layers.iter().enumerate() {
        if &l.crs != crs {
            return Err(Error::ReferenceSystem {
                layer: l.name.clone(),
                expected: crs.clone(),
                found: l.crs.clone(),
            });
        }
        if layers[..k].iter().any(|o| o.name == l.name) {
            return Err(Error::InvalidInput(format!("duplicate layer name {:?}", l.name)));
        }
        for (i, r) in l.regions.iter().enumerate() {
            r.polygon
                .check()
                .map_err(|e| Error::InvalidInput(format!("layer {:?} region {i}: {e}", l.name)))?;
        }
    }
    Ok(())
}

/// Overlays two or more layers sharing one reference tag.
pub fn overlay(layers: &[Layer]) -> Result<OverlayResult> {
    check_layers(layers)?;
    let mut segs = Vec::new();
    for l in layers {
        for r in &l.regions {
            for ring in r.polygon.rings() {
                for k in 0..ring.len() {
                    segs.push((ring[k], ring[(k + 1) % ring.len()]));
                }
            }
        }
    }
    let arr = arrangement::build(&segs);
    let boxes: Vec<Vec<[f64; 4]>> = layers
        .iter()
        .map(|l| l.regions.iter().map(|r| r.polygon.bbox()).collect())
        .collect();
    let cells: Vec<Option<Cell>> = arr
        .faces
        .par_iter()
        .map(|f| {
            let s = f.sample.approx();
            let mut provenance = Vec::with_capacity(layers.len());
            let mut attributes = AttributeRecord::new();
            for (li, l) in layers.iter().enumerate() {
                let mut hit = None;
                for (ri, r) in l.regions.iter().enumerate() {
                    let b = boxes[li][ri];
                    if s[0] < b[0] - 1e-9 * (1.0 + b[0].abs())
                        || s[0] > b[2] + 1e-9 * (1.0 + b[2].abs())
                        || s[1] < b[1] - 1e-9 * (1.0 + b[1].abs())
                        || s[1] > b[3] + 1e-9 * (1.0 + b[3].abs())
                    {
                        continue;
                    }
                    if r.polygon.locate(&f.sample) == Inside::In {
                        if let Some(prev) = hit {
                            return Err(Error::InvalidInput(format!(
                                "layer {:?}: regions {prev} and {ri} overlap",
                                l.name
                            )));
                        }
                        hit = Some(ri);
                    }
                }
                if let Some(ri) = hit {
                    for (k, v) in &l.regions[ri].attributes {
                        attributes.insert(format!("{}.{}", l.name, k), v.clone());
                    }
                }
                provenance.push(hit);
            }
            Ok(provenance.iter().any(|p| p.is_some()).then(|| Cell {
                polygon: polygon_from(&arr, f),
                provenance,
                attributes,
            }))
        })
        .collect::<Result<_>>()?;
    let mut cells: Vec<Cell> = cells.into_iter().flatten().collect();
    for c in &mut cells {
        canonical_start(&mut c.polygon.outer);
    }
    cells.sort_by(|a, b| {
        let (p, q) = (a.polygon.outer[0], b.polygon.outer[0]);
        p[0].total_cmp(&q[0])
            .then(p[1].total_cmp(&q[1]))
            .then(a.area().total_cmp(&b.area()))
    });
    Ok(OverlayResult {
        crs: layers[0].crs.clone(),
        layers: layers.iter().map(|l| l.name.clone()).collect(),
        cells,
    })
}

/// Rotates a ring to start at its lexicographically smallest vertex.
fn canonical_start(ring: &mut [[f64; 2]]) {
    if let Some(k) = (0..ring.len()).min_by(|&i, &j| {
        ring[i][0]
            .total_cmp(&ring[j][0])
            .then(ring[i][1].total_cmp(&ring[j][1]))
    }) {
        ring.rotate_left(k);
    }
}

/// Merges polygons that share boundary edges (vertices must coincide
/// exactly) into maximal polygons.
pub fn dissolve(polys: &[&Polygon]) -> Vec<Polygon> {
    use std::collections::HashMap;
    type Key = [u64; 2];
    let key = |p: [f64; 2]| [p[0].to_bits(), p[1].to_bits()];
    let mut directed: BTreeMap<(Key, Key), ([f64; 2], [f64; 2])> = BTreeMap::new();
    for p in polys {
        for r in p.rings() {
            for k in 0..r.len() {
                let (a, b) = (r[k], r[(k + 1) % r.len()]);
                if directed.remove(&(key(b), key(a))).is_none() {
                    directed.insert((key(a), key(b)), (a, b));
                }
            }
        }
    }
    let mut outgoing: HashMap<Key, Vec<(f64, Key, [f64; 2])>> = HashMap::new();
    for (&(ka, kb), &(a, b)) in &directed {
        let ang = (b[1] - a[1]).atan2(b[0] - a[0]);
        outgoing.entry(ka).or_default().push((ang, kb, b));
    }
    for v in outgoing.values_mut() {
        v.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    }
    let mut used: std::collections::HashSet<(Key, Key)> = Default::default();
    let mut rings: Vec<Vec<[f64; 2]>> = Vec::new();
    for (&(ka, kb), &(a, _)) in &directed {
        if used.contains(&(ka, kb)) {
            continue;
        }
        let mut ring = vec![a];
        let (mut from, mut cur) = (ka, kb);
        let mut from_pt = a;
        used.insert((ka, kb));
        while cur != ka || ring.is_empty() {
            let list = &outgoing[&cur];
            let cur_pt = directed[&(from, cur)].1;
            // Next edge: first one clockwise from the way back.
            let back = (from_pt[1] - cur_pt[1]).atan2(from_pt[0] - cur_pt[0]);
            let cands: Vec<&(f64, Key, [f64; 2])> = list.iter().filter(|e| !used.contains(&(cur, e.1))).collect();
            let pick = cands
                .iter()
                .filter(|e| e.0 < back)
                .max_by(|x, y| x.0.total_cmp(&y.0))
                .or_else(|| cands.iter().max_by(|x, y| x.0.total_cmp(&y.0)))
                .copied();
            let Some(&(_, nk, _)) = pick else { break };
            ring.push(cur_pt);
            used.insert((cur, nk));
            from = cur;
            from_pt = cur_pt;
            cur = nk;
        }
        rings.push(simplify_ring(ring));
    }
    let (outers, holes): (Vec<_>, Vec<_>) = rings
        .into_iter()
        .filter(|r| r.len() >= 3)
        .partition(|r| ring_area(r) > 0.0);
    let mut out: Vec<Polygon> = outers
        .into_iter()
        .map(|o| Polygon {
            outer: o,
            holes: Vec::new(),
        })
        .collect();
    for h in holes {
        let q: Vec<P2> = h.iter().map(|&p| P2::from_f64(p)).collect();
        let mut best: Option<usize> = None;
        for (k, o) in out.iter().enumerate() {
            let ring: Vec<P2> = o.outer.iter().map(|&p| P2::from_f64(p)).collect();
            let inside = q
                .iter()
                .map(|p| locate_in_ring(p, &ring))
                .find(|&l| l != Inside::On)
                .unwrap_or(Inside::On);
            if inside == Inside::In && best.is_none_or(|b| ring_area(&out[b].outer) > ring_area(&o.outer)) {
                best = Some(k);
            }
        }
        if let Some(b) = best {
            out[b].holes.push(h);
        }
    }
    for p in &mut out {
        canonical_start(&mut p.outer);
    }
    out.sort_by(|a, b| {
        let (p, q) = (a.outer[0], b.outer[0]);
        p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1]))
    });
    out
}

/// Drops vertices lying on the straight segment between their neighbours.
fn simplify_ring(mut r: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let mut changed = true;
    while changed && r.len() > 3 {
        changed = false;
        for i in 0..r.len() {
            let n = r.len();
            let (a, b, c) = (r[(i + n - 1) % n], r[i], r[(i + 1) % n]);
            let forward = (b[0] - a[0]) * (c[0] - b[0]) + (b[1] - a[1]) * (c[1] - b[1]) > 0.0;
            if o2(a, b, c) == Sign::Zero && forward {
                r.remove(i);
                changed = true;
                break;
            }
        }
    }
    r
}

/// A reclassification rule: the first matching case assigns the class.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassRule {
    #[serde(default)]
    pub cases: Vec<RuleCase>,
    #[serde(default)]
    pub default: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleCase {
    /// Merged attributes (`layer.attr`) that must be present with these values.
    #[serde(default)]
    pub when: AttributeRecord,
    /// Layers that must all cover the cell.
    #[serde(default)]
    pub covered_by: Vec<String>,
    /// When set, the exact set of covering layers.
    #[serde(default)]
    pub only: Option<Vec<String>>,
    pub class: String,
}

impl ClassRule {
    pub fn class_of(&self, cell: &Cell, result: &OverlayResult) -> Option<String> {
        for c in &self.cases {
            let attrs = c.when.iter().all(|(k, v)| cell.attributes.get(k) == Some(v));
            let cover = cell.covered_by(result, &c.covered_by.iter().map(|s| s.as_str()).collect::<Vec<_>>());
            let only = c.only.as_ref().is_none_or(|ls| {
                let mut want: Vec<&str> = ls.iter().map(|s| s.as_str()).collect();
                want.sort_unstable();
                let cov = cell.coverage(result);
                let mut have: Vec<&str> = cov.split('+').filter(|s| !s.is_empty()).collect();
                have.sort_unstable();
                want == have
            });
            if attrs && cover && only {
                return Some(c.class.clone());
            }
        }
        self.default.clone()
    }

    /// One class per distinct attribute combination.
    pub fn identity() -> IdentityRule {
        IdentityRule
    }
}

pub struct IdentityRule;

/// Anything that assigns class labels to cells.
pub trait Classifier {
    fn classify(&self, cell: &Cell, result: &OverlayResult) -> Option<String>;
}

impl Classifier for ClassRule {
    fn classify(&self, cell: &Cell, result: &OverlayResult) -> Option<String> {
        self.class_of(cell, result)
    }
}

impl Classifier for IdentityRule {
    fn classify(&self, cell: &Cell, _: &OverlayResult) -> Option<String> {
        Some(serde_json::to_string(&cell.attributes).expect("attributes serialize"))
    }
}

impl<F: Fn(&Cell) -> Option<String>> Classifier for F {
    fn classify(&self, cell: &Cell, _: &OverlayResult) -> Option<String> {
        self(cell)
    }
}

fn labels(result: &OverlayResult, rule: &dyn Classifier) -> Result<Vec<String>> {
    result
        .cells
        .iter()
        .map(|c| {
            rule.classify(c, result).ok_or_else(|| {
                Error::Classification(serde_json::to_string(&c.attributes).expect("attributes serialize"))
            })
        })
        .collect()
}

/// Assigns a class to every cell and dissolves adjacent cells of equal class.
/// The output layer's regions carry a single `class` attribute.
pub fn reclassify(result: &OverlayResult, rule: &dyn Classifier) -> Result<Layer> {
    let labels = labels(result, rule)?;
    let mut by_class: BTreeMap<&str, Vec<&Polygon>> = BTreeMap::new();
    for (c, l) in result.cells.iter().zip(&labels) {
        by_class.entry(l).or_default().push(&c.polygon);
    }
    let mut layer = Layer::new("class", result.crs.clone());
    for (label, polys) in by_class {
        for p in dissolve(&polys) {
            let mut a = AttributeRecord::new();
            a.insert("class".into(), AttrValue::Text(label.to_string()));
            layer.regions.push(Region {
                polygon: p,
                attributes: a,
            });
        }
    }
    Ok(layer)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stats {
    pub cell_count: usize,
    pub total_area: f64,
    /// Area per class: the rule's class when given, otherwise the set of
    /// covering layers (`a+b`).
    pub area_by_class: BTreeMap<String, f64>,
}

/// Aggregates the cells matching `predicate`.
pub fn region_stats(
    result: &OverlayResult,
    predicate: impl Fn(&Cell) -> bool,
    rule: Option<&dyn Classifier>,
) -> Result<Stats> {
    let mut s = Stats {
        cell_count: 0,
        total_area: 0.0,
        area_by_class: BTreeMap::new(),
    };
    for c in result.cells.iter().filter(|c| predicate(c)) {
        let class = match rule {
            Some(r) => r
                .classify(c, result)
                .ok_or_else(|| Error::Classification(serde_json::to_string(&c.attributes).unwrap_or_default()))?,
            None => c.coverage(result),
        };
        let a = c.area();
        s.cell_count += 1;
        s.total_area += a;
        *s.area_by_class.entry(class).or_insert(0.0) += a;
    }
    Ok(s)
}
