//! Bounding-volume hierarchy over axis-aligned boxes.

use std::hash::{Hash, Hasher};

use crate::geom::{Aabb, Point3};
use crate::mesh::Mesh;

/// Maximum number of primitives in a leaf.
pub const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone)]
struct Node {
    bbox: Aabb,
    /// Children for inner nodes; `None` for leaves.
    children: Option<[usize; 2]>,
    /// Range into `AabbTree::order` covered by this node.
    start: usize,
    end: usize,
}

/// Immutable AABB hierarchy built by median split on the longest axis.
#[derive(Debug, Clone)]
pub struct AabbTree {
    nodes: Vec<Node>,
    order: Vec<usize>,
    boxes: Vec<Aabb>,
    leaf_size: usize,
    digest: u64,
}

impl AabbTree {
    /// Builds a tree over `boxes`; primitive ids are the box indices.
    pub fn build(boxes: Vec<Aabb>) -> AabbTree {
        AabbTree::with_leaf_size(boxes, LEAF_SIZE)
    }

    pub fn with_leaf_size(boxes: Vec<Aabb>, leaf_size: usize) -> AabbTree {
        let leaf_size = leaf_size.max(1);
        let mut order: Vec<usize> = (0..boxes.len()).collect();
        let mut nodes = Vec::new();
        if !boxes.is_empty() {
            let centers: Vec<Point3> = boxes.iter().map(|b| b.center()).collect();
            build_node(&boxes, &centers, &mut order, 0, boxes.len(), leaf_size, &mut nodes);
        }
        AabbTree {
            nodes,
            order,
            boxes,
            leaf_size,
            digest: 0,
        }
    }

    /// Tree over the triangles of a mesh.
    pub fn for_mesh(m: &Mesh) -> AabbTree {
        AabbTree::build(m.triangle_iter().map(|t| t.aabb()).collect())
    }

    /// Tree over whole entities of a scene, stamped with the scene digest so
    /// later queries can detect that the scene changed.
    pub fn for_scene(scene: &[Mesh]) -> AabbTree {
        let mut t = AabbTree::build(scene.iter().map(|m| m.aabb()).collect());
        t.digest = scene_digest(scene);
        t
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn leaf_size(&self) -> usize {
        self.leaf_size
    }

    /// Digest of the scene the tree was built over (0 for non-scene trees).
    pub fn digest(&self) -> u64 {
        self.digest
    }

    pub fn primitive_box(&self, i: usize) -> Aabb {
        self.boxes[i]
    }

    pub fn root_box(&self) -> Aabb {
        self.nodes.first().map(|n| n.bbox).unwrap_or(Aabb::EMPTY)
    }

    pub fn depth(&self) -> usize {
        fn d(t: &AabbTree, n: usize) -> usize {
            match t.nodes[n].children {
                None => 1,
                Some([l, r]) => 1 + d(t, l).max(d(t, r)),
            }
        }
        if self.nodes.is_empty() {
            0
        } else {
            d(self, 0)
        }
    }

    /// Checks that each child box lies in its parent, each primitive lies in
    /// its leaf box, leaves respect the fan-out, and every primitive appears
    /// exactly once.
    pub fn check_invariants(&self) -> bool {
        let mut seen = vec![false; self.boxes.len()];
        for n in &self.nodes {
            match n.children {
                Some(ch) => {
                    for c in ch {
                        if !n.bbox.contains_box(&self.nodes[c].bbox) {
                            return false;
                        }
                    }
                }
                None => {
                    if n.end - n.start > self.leaf_size {
                        return false;
                    }
                    for &p in &self.order[n.start..n.end] {
                        if !n.bbox.contains_box(&self.boxes[p]) || seen[p] {
                            return false;
                        }
                        seen[p] = true;
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Ids of primitives whose boxes overlap `q` (closed boxes), ascending.
    pub fn query_box(&self, q: &Aabb) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit(
            |b| b.overlaps(q),
            |p| {
                if self.boxes[p].overlaps(q) {
                    out.push(p);
                }
            },
        );
        out.sort_unstable();
        out
    }

    /// Ids of primitives whose boxes the segment `a`–`b` touches, ascending.
    pub fn query_segment(&self, a: Point3, b: Point3) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit(
            |bx| bx.intersects_segment(a, b),
            |p| {
                if self.boxes[p].intersects_segment(a, b) {
                    out.push(p);
                }
            },
        );
        out.sort_unstable();
        out
    }

    fn visit(&self, mut enter: impl FnMut(&Aabb) -> bool, mut leaf: impl FnMut(usize)) {
        if self.nodes.is_empty() {
            return;
        }
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if !enter(&node.bbox) {
                continue;
            }
            match node.children {
                Some([l, r]) => {
                    stack.push(r);
                    stack.push(l);
                }
                None => {
                    for &p in &self.order[node.start..node.end] {
                        leaf(p);
                    }
                }
            }
        }
    }

    /// All pairs `[i, j]`, `i < j`, of primitives with overlapping boxes, sorted.
    pub fn self_pairs(&self) -> Vec<[usize; 2]> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            return out;
        }
        let mut stack = vec![(0usize, 0usize)];
        while let Some((a, b)) = stack.pop() {
            let (na, nb) = (&self.nodes[a], &self.nodes[b]);
            if !na.bbox.overlaps(&nb.bbox) {
                continue;
            }
            match (na.children, nb.children) {
                (None, None) => {
                    for (k, &p) in self.order[na.start..na.end].iter().enumerate() {
                        let rest = if a == b {
                            &self.order[na.start + k + 1..na.end]
                        } else {
                            &self.order[nb.start..nb.end]
                        };
                        for &q in rest {
                            if self.boxes[p].overlaps(&self.boxes[q]) {
                                out.push([p.min(q), p.max(q)]);
                            }
                        }
                    }
                }
                _ if a == b => {
                    let [l, r] = na.children.unwrap();
                    stack.push((l, l));
                    stack.push((r, r));
                    stack.push((l, r));
                }
                (Some([l, r]), None) => {
                    stack.push((l, b));
                    stack.push((r, b));
                }
                (None, Some([l, r])) => {
                    stack.push((a, l));
                    stack.push((a, r));
                }
                (Some([l, r]), Some(_)) => {
                    stack.push((l, b));
                    stack.push((r, b));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// All pairs `(i, j)` with primitive `i` of `self` overlapping primitive
    /// `j` of `other`, sorted.
    pub fn cross_pairs(&self, other: &AabbTree) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        if self.nodes.is_empty() || other.nodes.is_empty() {
            return out;
        }
        let mut stack = vec![(0usize, 0usize)];
        while let Some((a, b)) = stack.pop() {
            let (na, nb) = (&self.nodes[a], &other.nodes[b]);
            if !na.bbox.overlaps(&nb.bbox) {
                continue;
            }
            match (na.children, nb.children) {
                (None, None) => {
                    for &p in &self.order[na.start..na.end] {
                        for &q in &other.order[nb.start..nb.end] {
                            if self.boxes[p].overlaps(&other.boxes[q]) {
                                out.push((p, q));
                            }
                        }
                    }
                }
                (Some([l, r]), None) => {
                    stack.push((l, b));
                    stack.push((r, b));
                }
                (None, Some([l, r])) => {
                    stack.push((a, l));
                    stack.push((a, r));
                }
                (Some([l, r]), Some([x, y])) => {
                    // Descend into the larger box first.
                    if na.bbox.diagonal() >= nb.bbox.diagonal() {
                        stack.push((l, b));
                        stack.push((r, b));
                    } else {
                        stack.push((a, x));
                        stack.push((a, y));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn build_node(
    boxes: &[Aabb],
    centers: &[Point3],
    order: &mut [usize],
    start: usize,
    end: usize,
    leaf_size: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let bbox = order[start..end]
        .iter()
        .fold(Aabb::EMPTY, |acc, &i| acc.union(boxes[i]));
    let id = nodes.len();
    nodes.push(Node {
        bbox,
        children: None,
        start,
        end,
    });
    if end - start <= leaf_size {
        return id;
    }
    let cbox = order[start..end]
        .iter()
        .fold(Aabb::EMPTY, |acc, &i| acc.including(centers[i]));
    let axis = cbox.longest_axis();
    let mid = start + (end - start) / 2;
    order[start..end].select_nth_unstable_by(mid - start, |&i, &j| {
        centers[i][axis].total_cmp(&centers[j][axis]).then(i.cmp(&j))
    });
    let l = build_node(boxes, centers, order, start, mid, leaf_size, nodes);
    let r = build_node(boxes, centers, order, mid, end, leaf_size, nodes);
    nodes[id].children = Some([l, r]);
    id
}

/// Content digest of a scene (vertex bits and connectivity of every entity).
pub fn scene_digest(scene: &[Mesh]) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    scene.len().hash(&mut h);
    for m in scene {
        m.vertices().len().hash(&mut h);
        for v in m.vertices() {
            v.bits().hash(&mut h);
        }
        m.triangles().hash(&mut h);
    }
    h.finish()
}
