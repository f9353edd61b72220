//! Brute-force reference computations for the test suites.
//!
//! Everything here works on plain coordinate arrays and shares no code with
//! the kernel, so agreement between the two is meaningful.

pub mod hull;
pub mod sampling;
pub mod voxel;

pub type V3 = [f64; 3];

pub fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: V3) -> f64 {
    dot(a, a).sqrt()
}

/// Generalized winding number of a closed triangle surface about `p`.
pub fn winding_number(vertices: &[V3], triangles: &[[usize; 3]], p: V3) -> f64 {
    let mut total = 0.0;
    for t in triangles {
        let a = sub(vertices[t[0]], p);
        let b = sub(vertices[t[1]], p);
        let c = sub(vertices[t[2]], p);
        let (la, lb, lc) = (norm(a), norm(b), norm(c));
        let num = dot(a, cross(b, c));
        let den = la * lb * lc + dot(a, b) * lc + dot(b, c) * la + dot(c, a) * lb;
        total += 2.0 * num.atan2(den);
    }
    total / (4.0 * std::f64::consts::PI)
}

pub fn inside_mesh(vertices: &[V3], triangles: &[[usize; 3]], p: V3) -> bool {
    winding_number(vertices, triangles, p) > 0.5
}

/// All pairs `(i, j)`, `i < j`, of closed boxes that overlap or touch.
pub fn overlapping_box_pairs(boxes: &[(V3, V3)]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            let (a, b) = (boxes[i], boxes[j]);
            if (0..3).all(|k| a.0[k] <= b.1[k] && b.0[k] <= a.1[k]) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Area of the intersection of two axis-aligned rectangles `(min, max)`.
pub fn rect_overlap_area(a: ([f64; 2], [f64; 2]), b: ([f64; 2], [f64; 2])) -> f64 {
    let w = (a.1[0].min(b.1[0]) - a.0[0].max(b.0[0])).max(0.0);
    let h = (a.1[1].min(b.1[1]) - a.0[1].max(b.0[1])).max(0.0);
    w * h
}
