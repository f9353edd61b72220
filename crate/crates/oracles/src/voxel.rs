//! Volume estimates by counting voxel centres.

use crate::V3;

/// A cubic grid of `n³` cells over the bounding cube of `lo..hi`.
#[derive(Debug, Clone, Copy)]
pub struct Grid {
    pub lo: V3,
    pub h: f64,
    pub n: usize,
}

impl Grid {
    pub fn covering(lo: V3, hi: V3, n: usize) -> Grid {
        let side = (0..3).map(|k| hi[k] - lo[k]).fold(0.0, f64::max);
        Grid {
            lo,
            h: side / n as f64,
            n,
        }
    }

    /// A grid with spacing `h` covering `lo..hi`.
    pub fn with_spacing(lo: V3, hi: V3, h: f64) -> Grid {
        let side = (0..3).map(|k| hi[k] - lo[k]).fold(0.0, f64::max);
        Grid {
            lo,
            h,
            n: (side / h).ceil() as usize,
        }
    }

    pub fn centre(&self, i: usize, j: usize, k: usize) -> V3 {
        [
            self.lo[0] + (i as f64 + 0.5) * self.h,
            self.lo[1] + (j as f64 + 0.5) * self.h,
            self.lo[2] + (k as f64 + 0.5) * self.h,
        ]
    }

    pub fn cell_volume(&self) -> f64 {
        self.h * self.h * self.h
    }

    /// Occupancy of every cell, indexed `(i·n + j)·n + k`.
    pub fn occupancy(&self, inside: impl Fn(V3) -> bool) -> Vec<bool> {
        let n = self.n;
        let mut occ = vec![false; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    occ[(i * n + j) * n + k] = inside(self.centre(i, j, k));
                }
            }
        }
        occ
    }

    pub fn volume(&self, inside: impl Fn(V3) -> bool) -> f64 {
        self.count(&self.occupancy(inside)) as f64 * self.cell_volume()
    }

    pub fn count(&self, occ: &[bool]) -> usize {
        occ.iter().filter(|&&b| b).count()
    }

    /// Dilation of an occupancy grid by the box of `steps[a] + 1` cells
    /// along each axis, extending towards positive indices.
    pub fn dilate_box(&self, occ: &[bool], steps: [usize; 3]) -> Vec<bool> {
        let n = self.n;
        let idx = |c: [usize; 3]| (c[0] * n + c[1]) * n + c[2];
        let mut cur = occ.to_vec();
        for axis in 0..3 {
            let mut next = vec![false; cur.len()];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let c = [i, j, k];
                        if !cur[idx(c)] {
                            continue;
                        }
                        for s in 0..=steps[axis] {
                            let mut d = c;
                            d[axis] += s;
                            if d[axis] >= n {
                                break;
                            }
                            next[idx(d)] = true;
                        }
                    }
                }
            }
            cur = next;
        }
        cur
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_and_box() {
        let g = Grid::covering([-1.0; 3], [1.0; 3], 64);
        let v = g.volume(|p| p[0] * p[0] + p[1] * p[1] + p[2] * p[2] <= 1.0);
        let exact = 4.0 * std::f64::consts::PI / 3.0;
        assert!((v - exact).abs() < 0.01 * exact);
        let g = Grid::with_spacing([0.0; 3], [2.0; 3], 0.125);
        let occ = g.occupancy(|p| p.iter().all(|&x| x < 1.0));
        let d = g.dilate_box(&occ, [4, 4, 4]);
        assert_eq!(g.count(&d) as f64 * g.cell_volume(), 1.5f64.powi(3));
    }
}
