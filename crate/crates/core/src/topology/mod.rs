//! Boundary-representation topology: nodes, arcs, rings, faces, bodies and
//! features, with explicit incidence maps in both directions.

mod json;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point3, Tolerance};
use crate::mesh::Mesh;
use crate::shapes::newell_normal;

pub use json::{model_from_json, model_to_json};

/// A planar polygonal face: outer ring plus hole rings, as vertex loops.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFace {
    pub outer: Vec<Point3>,
    pub holes: Vec<Vec<Point3>>,
}

impl PolyFace {
    pub fn new(outer: Vec<Point3>) -> PolyFace {
        PolyFace {
            outer,
            holes: Vec::new(),
        }
    }
}

/// The faces bounding one body, oriented outward.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BodyInput {
    pub faces: Vec<PolyFace>,
}

impl BodyInput {
    /// One face per triangle.
    pub fn from_mesh(m: &Mesh) -> BodyInput {
        BodyInput {
            faces: m
                .triangle_iter()
                .map(|t| PolyFace::new(t.vertices().to_vec()))
                .collect(),
        }
    }

    /// Merges edge-adjacent coplanar triangles into polygonal faces (with
    /// holes where the merged patch has them).
    pub fn from_mesh_merged(m: &Mesh, tol: &Tolerance) -> BodyInput {
        let w = m.welded();
        let n = w.triangles().len();
        let normals: Vec<Point3> = w.triangle_iter().map(|t| t.unit_normal()).collect();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for inc in w.edge_incidence().values() {
            if let [(a, _), (b, _)] = inc[..] {
                let same = normals[a].dot(normals[b]) >= (1.0 - tol.angular_eps).min(1.0 - 1e-12);
                let t = w.triangle(a);
                let far = w.triangles()[b]
                    .iter()
                    .map(|&k| w.vertices()[k])
                    .map(|p| normals[a].dot(p - t.p).abs());
                if same && far.fold(0.0, f64::max) <= tol.eps {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for t in 0..n {
            let r = find(&mut parent, t);
            groups.entry(r).or_default().push(t);
        }
        let mut faces = Vec::new();
        for tris in groups.values() {
            faces.extend(merge_patch(&w, tris, normals[tris[0]]));
        }
        BodyInput { faces }
    }
}

/// Boundary rings of a planar triangle patch, grouped into faces.
fn merge_patch(w: &Mesh, tris: &[usize], normal: Point3) -> Vec<PolyFace> {
    let mut edges: BTreeMap<(usize, usize), ()> = BTreeMap::new();
    for &t in tris {
        let v = w.triangles()[t];
        for k in 0..3 {
            let (a, b) = (v[k], v[(k + 1) % 3]);
            if edges.remove(&(b, a)).is_none() {
                edges.insert((a, b), ());
            }
        }
    }
    let mut next: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in edges.keys() {
        next.entry(a).or_default().push(b);
    }
    let mut rings: Vec<Vec<usize>> = Vec::new();
    while let Some((&start, _)) = next.iter().find(|(_, v)| !v.is_empty()) {
        let mut ring = vec![start];
        let mut cur = next.get_mut(&start).unwrap().remove(0);
        while cur != start {
            ring.push(cur);
            let list = next.get_mut(&cur).expect("boundary edges form cycles");
            cur = list.remove(0);
        }
        rings.push(ring);
    }
    let pts = |r: &[usize]| r.iter().map(|&k| w.vertices()[k]).collect::<Vec<_>>();
    let (outer, holes): (Vec<_>, Vec<_>) = rings
        .into_iter()
        .partition(|r| newell_normal(&pts(r)).dot(normal) > 0.0);
    let mut faces: Vec<PolyFace> = outer.iter().map(|r| PolyFace::new(pts(r))).collect();
    let axes = drop_axes(normal);
    let flat = |p: Point3| [p[axes.0], p[axes.1]];
    for h in holes {
        let q = flat(w.vertices()[h[0]]);
        let target = faces
            .iter()
            .position(|f| {
                let ring: Vec<[f64; 2]> = f.outer.iter().map(|&p| flat(p)).collect();
                point_in_ring_2d(q, &ring)
            })
            .unwrap_or(0);
        if let Some(f) = faces.get_mut(target) {
            f.holes.push(pts(&h));
        }
    }
    faces
}

fn drop_axes(n: Point3) -> (usize, usize) {
    let a = [n.x.abs(), n.y.abs(), n.z.abs()];
    if a[0] >= a[1] && a[0] >= a[2] {
        (1, 2)
    } else if a[1] >= a[2] {
        (2, 0)
    } else {
        (0, 1)
    }
}

fn point_in_ring_2d(q: [f64; 2], ring: &[[f64; 2]]) -> bool {
    let mut inside = false;
    for i in 0..ring.len() {
        let (a, b) = (ring[i], ring[(i + 1) % ring.len()]);
        if (a[1] > q[1]) != (b[1] > q[1]) {
            let x = a[0] + (q[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if q[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    /// Node chain; a closed arc repeats its first node at the end.
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    /// Arcs in order, each with its traversal direction (`true` = along the chain).
    pub arcs: Vec<(usize, bool)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Face {
    /// Outer ring first, then holes.
    pub rings: Vec<usize>,
    pub normal: Point3,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Body {
    /// Faces with orientation: `true` when the stored orientation faces outward.
    pub faces: Vec<(usize, bool)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub bodies: Vec<usize>,
}

/// The six relation groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationGroup {
    FeatureBody,
    BodyFace,
    FaceRing,
    RingArc,
    ArcNode,
    NodeArc,
}

impl RelationGroup {
    pub const ALL: [RelationGroup; 6] = [
        RelationGroup::FeatureBody,
        RelationGroup::BodyFace,
        RelationGroup::FaceRing,
        RelationGroup::RingArc,
        RelationGroup::ArcNode,
        RelationGroup::NodeArc,
    ];

    fn kinds(self) -> (&'static str, &'static str) {
        match self {
            RelationGroup::FeatureBody => ("feature", "body"),
            RelationGroup::BodyFace => ("body", "face"),
            RelationGroup::FaceRing => ("face", "ring"),
            RelationGroup::RingArc => ("ring", "arc"),
            RelationGroup::ArcNode => ("arc", "node"),
            RelationGroup::NodeArc => ("node", "arc"),
        }
    }
}

/// A relation and its inverse, as sorted id lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub forward: Vec<Vec<usize>>,
    pub inverse: Vec<Vec<usize>>,
}

impl Relation {
    fn from_forward(forward: Vec<Vec<usize>>, targets: usize) -> Relation {
        let forward: Vec<Vec<usize>> = forward
            .into_iter()
            .map(|mut v| {
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        let mut inverse = vec![Vec::new(); targets];
        for (i, v) in forward.iter().enumerate() {
            for &j in v {
                inverse[j].push(i);
            }
        }
        Relation { forward, inverse }
    }

    fn swapped(&self) -> Relation {
        Relation {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    /// Whether `inverse` is exactly the transpose of `forward`.
    pub fn is_transpose_consistent(&self) -> bool {
        let mut t = vec![Vec::new(); self.inverse.len()];
        for (i, v) in self.forward.iter().enumerate() {
            for &j in v {
                match t.get_mut(j) {
                    Some(list) => list.push(i),
                    None => return false,
                }
            }
        }
        for list in &mut t {
            list.sort_unstable();
            list.dedup();
        }
        t == self.inverse
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub nodes: usize,
    pub arcs: usize,
    pub rings: usize,
    pub faces: usize,
    pub bodies: usize,
    pub features: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EulerReport {
    pub v: usize,
    pub e: usize,
    pub f: usize,
    /// Hole rings over the body's faces.
    pub holes: usize,
    pub shells: usize,
    /// `V − E + F − holes`.
    pub characteristic: i64,
    pub genus: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopologyModel {
    pub nodes: Vec<Point3>,
    pub arcs: Vec<Arc>,
    pub rings: Vec<Ring>,
    pub faces: Vec<Face>,
    pub bodies: Vec<Body>,
    pub features: Vec<Feature>,
    relations: Vec<Relation>,
}

struct Welder {
    eps: f64,
    grid: HashMap<[i64; 3], Vec<usize>>,
    nodes: Vec<Point3>,
}

impl Welder {
    fn cell(&self, p: Point3) -> [i64; 3] {
        let k = |v: f64| (v / self.eps).floor().clamp(-9.0e18, 9.0e18) as i64;
        [k(p.x), k(p.y), k(p.z)]
    }

    fn insert(&mut self, p: Point3) -> Result<usize> {
        p.check_finite()?;
        let c = self.cell(p);
        let mut hits: Vec<usize> = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(list) = self.grid.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) {
                        hits.extend(list.iter().copied().filter(|&i| self.nodes[i].distance(p) <= self.eps));
                    }
                }
            }
        }
        hits.sort_unstable();
        hits.dedup();
        match hits[..] {
            [] => {
                self.nodes.push(p);
                self.grid.entry(c).or_default().push(self.nodes.len() - 1);
                Ok(self.nodes.len() - 1)
            }
            [i] => Ok(i),
            _ => Err(Error::Ambiguous(format!(
                "vertex {:?} is within {} of {} distinct nodes",
                p.to_array(),
                self.eps,
                hits.len()
            ))),
        }
    }
}

fn ring_key(r: &Ring) -> Vec<(usize, bool)> {
    let rot = |seq: &[(usize, bool)]| {
        let k = (0..seq.len()).min_by_key(|&i| seq[i]).unwrap_or(0);
        let mut s = seq.to_vec();
        s.rotate_left(k);
        s
    };
    let fwd = rot(&r.arcs);
    let rev: Vec<(usize, bool)> = r.arcs.iter().rev().map(|&(a, d)| (a, !d)).collect();
    let rev = rot(&rev);
    fwd.min(rev)
}

/// Builds the model. `features` lists body sets; when empty, one feature
/// holds every body.
pub fn build_topology(bodies: &[BodyInput], features: &[Vec<usize>], tol: &Tolerance) -> Result<TopologyModel> {
    if bodies.is_empty() {
        return Err(Error::InvalidInput("no bodies".into()));
    }
    let mut welder = Welder {
        eps: tol.eps,
        grid: HashMap::new(),
        nodes: Vec::new(),
    };
    // Per body, per face, per ring: node cycle.
    let mut loops: Vec<Vec<Vec<Vec<usize>>>> = Vec::with_capacity(bodies.len());
    for (bi, b) in bodies.iter().enumerate() {
        if b.faces.is_empty() {
            return Err(Error::InvalidInput(format!("body {bi} has no faces")));
        }
        let mut fl = Vec::with_capacity(b.faces.len());
        for (fi, f) in b.faces.iter().enumerate() {
            let mut rings = Vec::with_capacity(1 + f.holes.len());
            for r in std::iter::once(&f.outer).chain(&f.holes) {
                let mut ids = r.iter().map(|&p| welder.insert(p)).collect::<Result<Vec<_>>>()?;
                ids.dedup();
                while ids.len() > 1 && ids.first() == ids.last() {
                    ids.pop();
                }
                if ids.len() < 3 {
                    return Err(Error::InvalidInput(format!(
                        "body {bi} face {fi}: ring collapses after welding"
                    )));
                }
                rings.push(ids);
            }
            fl.push(rings);
        }
        loops.push(fl);
    }
    let nodes = welder.nodes;

    // Undirected edge graph.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for r in loops.iter().flatten().flatten() {
        for k in 0..r.len() {
            let (a, b) = (r[k], r[(k + 1) % r.len()]);
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    let arcs = chain_arcs(&adj);
    // Directed edge → (arc, forward, index of edge along the arc).
    let mut edge_arc: HashMap<(usize, usize), (usize, bool, usize)> = HashMap::new();
    for (ai, a) in arcs.iter().enumerate() {
        for (k, w) in a.nodes.windows(2).enumerate() {
            edge_arc.insert((w[0], w[1]), (ai, true, k));
            edge_arc.insert((w[1], w[0]), (ai, false, k));
        }
    }

    let mut rings: Vec<Ring> = Vec::new();
    let mut ring_ids: HashMap<Vec<(usize, bool)>, usize> = HashMap::new();
    let mut faces: Vec<Face> = Vec::new();
    let mut face_ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    let mut out_bodies: Vec<Body> = Vec::with_capacity(bodies.len());
    for (bi, fl) in loops.iter().enumerate() {
        let mut bf = Vec::with_capacity(fl.len());
        for (fi, fr) in fl.iter().enumerate() {
            let mut ids = Vec::with_capacity(fr.len());
            let mut outer_same = true;
            for (ri, r) in fr.iter().enumerate() {
                let ring = arc_ring(r, &arcs, &edge_arc);
                let key = ring_key(&ring);
                let id = *ring_ids.entry(key).or_insert_with(|| {
                    rings.push(ring.clone());
                    rings.len() - 1
                });
                if ri == 0 {
                    outer_same = ring_key_rotation_matches(&rings[id], &ring);
                }
                ids.push(id);
            }
            let key = (ids[0], {
                let mut h = ids[1..].to_vec();
                h.sort_unstable();
                h
            });
            let id = match face_ids.get(&key) {
                Some(&id) => id,
                None => {
                    let pts: Vec<Point3> = fr[0].iter().map(|&k| nodes[k]).collect();
                    let nn = newell_normal(&pts);
                    if nn.norm() == 0.0 {
                        return Err(Error::InvalidInput(format!("body {bi} face {fi}: zero area")));
                    }
                    // Stored orientation is that of the outer ring as stored.
                    let normal = if outer_same { nn.normalized() } else { -nn.normalized() };
                    let centroid = pts.iter().fold(Point3::ORIGIN, |a, &p| a + p) / pts.len() as f64;
                    let offset = normal.dot(centroid);
                    let diam = crate::geom::Aabb::from_points(&pts).diagonal();
                    let slack = tol.eps + tol.angular_eps * diam;
                    for r in fr {
                        for &k in r {
                            let d = (normal.dot(nodes[k]) - offset).abs();
                            if d > slack {
                                return Err(Error::InvalidInput(format!(
                                    "body {bi} face {fi}: not planar (vertex off plane by {d:e})"
                                )));
                            }
                        }
                    }
                    faces.push(Face {
                        rings: ids.clone(),
                        normal,
                        offset,
                    });
                    face_ids.insert(key, faces.len() - 1);
                    faces.len() - 1
                }
            };
            bf.push((id, outer_same));
        }
        out_bodies.push(Body { faces: bf });
    }

    let features: Vec<Feature> = if features.is_empty() {
        vec![Feature {
            bodies: (0..out_bodies.len()).collect(),
        }]
    } else {
        features.iter().map(|b| Feature { bodies: b.clone() }).collect()
    };
    TopologyModel::from_tables(nodes, arcs, rings, faces, out_bodies, features)
}

/// True when `ring` runs in the same direction as the stored ring.
fn ring_key_rotation_matches(stored: &Ring, ring: &Ring) -> bool {
    let n = stored.arcs.len();
    (0..n).any(|k| (0..n).all(|i| stored.arcs[(i + k) % n] == ring.arcs[i]))
}

/// Maximal chains through degree-2 nodes; leftover pure cycles become closed
/// arcs starting at their smallest node.
fn chain_arcs(adj: &[Vec<usize>]) -> Vec<Arc> {
    let mut used: std::collections::HashSet<(usize, usize)> = Default::default();
    let mut arcs = Vec::new();
    let walk = |start: usize, first: usize, used: &mut std::collections::HashSet<(usize, usize)>| {
        let mut chain = vec![start, first];
        used.insert((start.min(first), start.max(first)));
        let (mut prev, mut cur) = (start, first);
        while adj[cur].len() == 2 && cur != start {
            let nxt = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
            if !used.insert((cur.min(nxt), cur.max(nxt))) {
                break;
            }
            chain.push(nxt);
            prev = cur;
            cur = nxt;
        }
        Arc { nodes: chain }
    };
    for v in 0..adj.len() {
        if adj[v].len() == 2 {
            continue;
        }
        for &w in &adj[v] {
            if !used.contains(&(v.min(w), v.max(w))) {
                arcs.push(walk(v, w, &mut used));
            }
        }
    }
    for v in 0..adj.len() {
        for &w in &adj[v] {
            if !used.contains(&(v.min(w), v.max(w))) {
                arcs.push(walk(v, w, &mut used));
            }
        }
    }
    arcs
}

fn arc_ring(r: &[usize], arcs: &[Arc], edge_arc: &HashMap<(usize, usize), (usize, bool, usize)>) -> Ring {
    let n = r.len();
    let info: Vec<(usize, bool, usize)> = (0..n).map(|k| edge_arc[&(r[k], r[(k + 1) % n])]).collect();
    let starts_arc = |e: &(usize, bool, usize)| {
        let len = arcs[e.0].nodes.len() - 1;
        if e.1 {
            e.2 == 0
        } else {
            e.2 == len - 1
        }
    };
    let s = (0..n).find(|&k| starts_arc(&info[k])).unwrap_or(0);
    let mut seq: Vec<(usize, bool)> = Vec::new();
    for k in 0..n {
        let e = info[(s + k) % n];
        if starts_arc(&e) || seq.is_empty() {
            seq.push((e.0, e.1));
        }
    }
    Ring { arcs: seq }
}

impl TopologyModel {
    /// Assembles a model from its tables, deriving the incidence maps and
    /// checking every structural invariant.
    pub fn from_tables(
        nodes: Vec<Point3>,
        arcs: Vec<Arc>,
        rings: Vec<Ring>,
        faces: Vec<Face>,
        bodies: Vec<Body>,
        features: Vec<Feature>,
    ) -> Result<TopologyModel> {
        let bad = |reason: String| Error::Topology {
            reason,
            arcs: Vec::new(),
        };
        for (i, a) in arcs.iter().enumerate() {
            if a.nodes.len() < 2 || a.nodes.iter().any(|&n| n >= nodes.len()) {
                return Err(bad(format!("arc {i} has invalid nodes")));
            }
        }
        for (i, r) in rings.iter().enumerate() {
            if r.arcs.is_empty() || r.arcs.iter().any(|&(a, _)| a >= arcs.len()) {
                return Err(bad(format!("ring {i} has invalid arcs")));
            }
            let ends = |&(a, d): &(usize, bool)| {
                let c = &arcs[a].nodes;
                if d {
                    (c[0], c[c.len() - 1])
                } else {
                    (c[c.len() - 1], c[0])
                }
            };
            for k in 0..r.arcs.len() {
                let (_, e) = ends(&r.arcs[k]);
                let (s, _) = ends(&r.arcs[(k + 1) % r.arcs.len()]);
                if e != s {
                    return Err(bad(format!("ring {i} is not a closed arc cycle")));
                }
            }
        }
        for (i, f) in faces.iter().enumerate() {
            if f.rings.is_empty() || f.rings.iter().any(|&r| r >= rings.len()) {
                return Err(bad(format!("face {i} has invalid rings")));
            }
        }
        for (i, b) in bodies.iter().enumerate() {
            if b.faces.iter().any(|&(f, _)| f >= faces.len()) {
                return Err(bad(format!("body {i} has invalid faces")));
            }
        }
        for (i, f) in features.iter().enumerate() {
            if let Some(&b) = f.bodies.iter().find(|&&b| b >= bodies.len()) {
                return Err(bad(format!("feature {i} names missing body {b}")));
            }
        }
        let fb = Relation::from_forward(features.iter().map(|f| f.bodies.clone()).collect(), bodies.len());
        let bf = Relation::from_forward(
            bodies
                .iter()
                .map(|b| b.faces.iter().map(|&(f, _)| f).collect())
                .collect(),
            faces.len(),
        );
        let fr = Relation::from_forward(faces.iter().map(|f| f.rings.clone()).collect(), rings.len());
        let ra = Relation::from_forward(
            rings.iter().map(|r| r.arcs.iter().map(|&(a, _)| a).collect()).collect(),
            arcs.len(),
        );
        let an = Relation::from_forward(arcs.iter().map(|a| a.nodes.clone()).collect(), nodes.len());
        let na = an.swapped();
        let model = TopologyModel {
            nodes,
            arcs,
            rings,
            faces,
            bodies,
            features,
            relations: vec![fb, bf, fr, ra, an, na],
        };
        for (g, r) in RelationGroup::ALL.iter().zip(&model.relations) {
            if !r.is_transpose_consistent() {
                return Err(bad(format!("{g:?} incidence is not its own inverse")));
            }
        }
        for b in 0..model.bodies.len() {
            model.check_shell(b)?;
        }
        Ok(model)
    }

    pub fn census(&self) -> Census {
        Census {
            nodes: self.nodes.len(),
            arcs: self.arcs.len(),
            rings: self.rings.len(),
            faces: self.faces.len(),
            bodies: self.bodies.len(),
            features: self.features.len(),
        }
    }

    pub fn relation(&self, group: RelationGroup) -> &Relation {
        &self.relations[RelationGroup::ALL
            .iter()
            .position(|&g| g == group)
            .expect("known group")]
    }

    /// Ids related to `id` by `group`, forward direction.
    pub fn related(&self, group: RelationGroup, id: usize) -> Result<&[usize]> {
        self.relation(group)
            .forward
            .get(id)
            .map(|v| v.as_slice())
            .ok_or(Error::Lookup {
                kind: group.kinds().0,
                id,
            })
    }

    /// Ids related to `id` by `group`, inverse direction.
    pub fn related_inverse(&self, group: RelationGroup, id: usize) -> Result<&[usize]> {
        self.relation(group)
            .inverse
            .get(id)
            .map(|v| v.as_slice())
            .ok_or(Error::Lookup {
                kind: group.kinds().1,
                id,
            })
    }

    pub fn faces_of_body(&self, body: usize) -> Result<&[usize]> {
        self.related(RelationGroup::BodyFace, body)
    }

    pub fn bodies_of_face(&self, face: usize) -> Result<&[usize]> {
        self.related_inverse(RelationGroup::BodyFace, face)
    }

    pub fn nodes_of_arc(&self, arc: usize) -> Result<&[usize]> {
        self.related(RelationGroup::ArcNode, arc)
    }

    pub fn arcs_of_node(&self, node: usize) -> Result<&[usize]> {
        self.related(RelationGroup::NodeArc, node)
    }

    fn ring_nodes(&self, ring: usize, forward: bool) -> Vec<usize> {
        let mut out = Vec::new();
        for &(a, d) in &self.rings[ring].arcs {
            let c = &self.arcs[a].nodes;
            let chain: Vec<usize> = if d {
                c.clone()
            } else {
                c.iter().rev().copied().collect()
            };
            out.extend_from_slice(&chain[..chain.len() - 1]);
        }
        if !forward {
            out.reverse();
        }
        out
    }

    /// Face rings as node cycles, oriented outward for the given usage.
    fn face_loops(&self, face: usize, outward: bool) -> Vec<Vec<usize>> {
        let f = &self.faces[face];
        f.rings
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let pts: Vec<Point3> = self.ring_nodes(r, true).iter().map(|&k| self.nodes[k]).collect();
                let along = newell_normal(&pts).dot(f.normal) > 0.0;
                // Outer ring counter-clockwise about the outward normal, holes clockwise.
                let want_ccw = (i == 0) == outward;
                self.ring_nodes(r, along == want_ccw)
            })
            .collect()
    }

    fn check_shell(&self, body: usize) -> Result<()> {
        let mut count: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for &(f, outward) in &self.bodies[body].faces {
            for l in self.face_loops(f, outward) {
                for k in 0..l.len() {
                    let (a, b) = (l[k], l[(k + 1) % l.len()]);
                    *count.entry((a, b)).or_insert(0) += 1;
                }
            }
        }
        let bad: Vec<[usize; 2]> = count
            .iter()
            .filter(|(&(a, b), &c)| c != 1 || count.get(&(b, a)) != Some(&1))
            .map(|(&(a, b), _)| [a.min(b), a.max(b)])
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Topology {
                reason: format!(
                    "body {body} is not a closed oriented shell ({} boundary edges)",
                    bad.len()
                ),
                arcs: bad,
            })
        }
    }

    /// Euler census of one body's shell.
    pub fn euler_check(&self, body: usize) -> Result<EulerReport> {
        let b = self.bodies.get(body).ok_or(Error::Lookup { kind: "body", id: body })?;
        self.check_shell(body)?;
        let mut arcs: Vec<usize> = Vec::new();
        let mut rings = 0;
        for &(f, _) in &b.faces {
            rings += self.faces[f].rings.len();
            for &r in &self.faces[f].rings {
                arcs.extend(self.rings[r].arcs.iter().map(|&(a, _)| a));
            }
        }
        arcs.sort_unstable();
        arcs.dedup();
        let mut nodes: Vec<usize> = arcs
            .iter()
            .flat_map(|&a| {
                let c = &self.arcs[a].nodes;
                [c[0], c[c.len() - 1]]
            })
            .collect();
        nodes.sort_unstable();
        nodes.dedup();
        // Shells: faces connected through shared arcs.
        let faces: Vec<usize> = b.faces.iter().map(|&(f, _)| f).collect();
        let mut parent: Vec<usize> = (0..faces.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut by_arc: HashMap<usize, usize> = HashMap::new();
        for (i, &f) in faces.iter().enumerate() {
            for &r in &self.faces[f].rings {
                for &(a, _) in &self.rings[r].arcs {
                    if let Some(&j) = by_arc.get(&a) {
                        let (x, y) = (find(&mut parent, i), find(&mut parent, j));
                        parent[x.max(y)] = x.min(y);
                    } else {
                        by_arc.insert(a, i);
                    }
                }
            }
        }
        let shells = (0..faces.len()).filter(|&i| find(&mut parent, i) == i).count();
        let (v, e, f) = (nodes.len(), arcs.len(), faces.len());
        let holes = rings - f;
        let chi = v as i64 - e as i64 + f as i64 - holes as i64;
        Ok(EulerReport {
            v,
            e,
            f,
            holes,
            shells,
            characteristic: chi,
            genus: (2 * shells as i64 - chi) / 2,
        })
    }

    /// The model's faces per body, as build input (outward oriented).
    pub fn export_faces(&self) -> Vec<BodyInput> {
        self.bodies
            .iter()
            .map(|b| BodyInput {
                faces: b
                    .faces
                    .iter()
                    .map(|&(f, outward)| {
                        let mut loops = self
                            .face_loops(f, outward)
                            .into_iter()
                            .map(|l| l.iter().map(|&k| self.nodes[k]).collect::<Vec<_>>());
                        let outer = loops.next().expect("face has an outer ring");
                        PolyFace {
                            outer,
                            holes: loops.collect(),
                        }
                    })
                    .collect(),
            })
            .collect()
    }

    pub(crate) fn relations(&self) -> &[Relation] {
        &self.relations
    }
}
