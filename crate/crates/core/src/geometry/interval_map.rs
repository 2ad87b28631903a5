//! Piecewise-monotone expanding interval maps.
//!
//! A map is a list of monotone Möbius branches over a contiguous partition
//! of a seed interval. Forward images of interval unions are computed
//! exactly (split at branch boundaries, map endpoints), which is what the
//! no-small-returns certification iterates.

use alloc::vec::Vec;

use super::map::Mobius;
use super::GeometryError;

/// One monotone branch: the map on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch1d {
    pub lo: f64,
    pub hi: f64,
    pub map: Mobius,
}

/// A piecewise-monotone map of an interval given by expanding branches over
/// a contiguous partition.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseMap1d {
    seed: (f64, f64),
    branches: Vec<Branch1d>,
}

impl PiecewiseMap1d {
    /// Branches must tile the seed contiguously, be regular (pole-free) and
    /// expanding (`|T′| > 1`) on their domains.
    pub fn new(seed: (f64, f64), branches: Vec<Branch1d>) -> Result<Self, GeometryError> {
        if !(seed.0 < seed.1) || branches.is_empty() {
            return Err(GeometryError::InvalidSeed(
                "need a nondegenerate seed and at least one branch",
            ));
        }
        let mut cursor = seed.0;
        for (i, b) in branches.iter().enumerate() {
            if (b.lo - cursor).abs() > 1e-12 || !(b.lo < b.hi) {
                return Err(GeometryError::InvalidMap {
                    index: i,
                    reason: "branch domains must tile the seed contiguously",
                });
            }
            if !b.map.regular_on(b.lo, b.hi) {
                return Err(GeometryError::InvalidMap {
                    index: i,
                    reason: "branch has a pole on its domain",
                });
            }
            let (dlo, _) = b.map.deriv_range(b.lo, b.hi);
            if dlo <= 1.0 {
                return Err(GeometryError::InvalidMap {
                    index: i,
                    reason: "branch is not expanding",
                });
            }
            cursor = b.hi;
        }
        if (cursor - seed.1).abs() > 1e-12 {
            return Err(GeometryError::InvalidSeed("branches do not cover the seed"));
        }
        Ok(PiecewiseMap1d { seed, branches })
    }

    pub fn seed(&self) -> (f64, f64) {
        self.seed
    }

    pub fn branches(&self) -> &[Branch1d] {
        &self.branches
    }

    /// Index of the branch whose domain contains `x` (ties go left-closed;
    /// the last branch is right-closed).
    pub fn branch_of(&self, x: f64) -> Option<usize> {
        if x < self.seed.0 || x > self.seed.1 {
            return None;
        }
        for (i, b) in self.branches.iter().enumerate() {
            if x < b.hi || (i == self.branches.len() - 1 && x <= b.hi) {
                return Some(i);
            }
        }
        None
    }

    pub fn eval(&self, x: f64) -> Option<f64> {
        self.branch_of(x).map(|i| self.branches[i].map.eval(x))
    }

    /// Image of each branch domain.
    pub fn branch_image(&self, i: usize) -> (f64, f64) {
        let b = &self.branches[i];
        b.map.image(b.lo, b.hi)
    }

    /// Exact forward image of an interval union: split at branch
    /// boundaries, map endpoints, merge. Intervals are clipped to the seed.
    pub fn image_intervals(&self, parts: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for &(lo, hi) in parts {
            let lo = lo.max(self.seed.0);
            let hi = hi.min(self.seed.1);
            if !(lo < hi) {
                continue;
            }
            for b in &self.branches {
                let a = lo.max(b.lo);
                let c = hi.min(b.hi);
                if a < c {
                    out.push(b.map.image(a, c));
                }
            }
        }
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(out.len());
        for (a, b) in out {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        merged
    }

    /// The angle-doubling style map `x ↦ base·x mod 1` on `[0, 1]`.
    pub fn expanding_mod_one(base: u32) -> Self {
        let mut branches = Vec::new();
        let b = base as f64;
        for i in 0..base {
            let lo = i as f64 / b;
            let hi = (i + 1) as f64 / b;
            branches.push(Branch1d {
                lo,
                hi,
                map: Mobius::affine(b, -(i as f64)),
            });
        }
        PiecewiseMap1d::new((0.0, 1.0), branches).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn doubling_map_eval_and_images() {
        let t = PiecewiseMap1d::expanding_mod_one(2);
        assert_eq!(t.eval(0.25), Some(0.5));
        assert_eq!(t.eval(0.75), Some(0.5));
        let img = t.image_intervals(&[(0.4, 0.6)]);
        // Straddles the branch point: [0.8, 1] ∪ [0, 0.2].
        assert_eq!(img, vec![(0.0, 0.19999999999999996), (0.8, 1.0)]);
    }

    #[test]
    fn non_expanding_branch_rejected() {
        let err = PiecewiseMap1d::new(
            (0.0, 1.0),
            vec![Branch1d {
                lo: 0.0,
                hi: 1.0,
                map: Mobius::affine(0.9, 0.0),
            }],
        );
        assert!(err.is_err());
    }

    #[test]
    fn gapped_partition_rejected() {
        let err = PiecewiseMap1d::new(
            (0.0, 1.0),
            vec![
                Branch1d {
                    lo: 0.0,
                    hi: 0.4,
                    map: Mobius::affine(2.5, 0.0),
                },
                Branch1d {
                    lo: 0.5,
                    hi: 1.0,
                    map: Mobius::affine(2.0, -1.0),
                },
            ],
        );
        assert!(err.is_err());
    }
}
