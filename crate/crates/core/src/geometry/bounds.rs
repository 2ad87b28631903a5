//! Certified two-sided bounds on projected measures of balls, annuli, and
//! 1D interval sets.
//!
//! The walker descends the cylinder tree, keeping only cylinders whose hulls
//! meet the query region. A hull strictly inside the region puts its whole
//! symbolic mass into both bounds and stops; a straddling hull is refined
//! until its relative diameter drops below `2^{-generation}`, at which point
//! its mass is charged to the upper bound only. Since hulls contain the true
//! cylinder images and distinct incomparable cylinders are disjoint in symbol
//! space, the lower bound never overshoots and the upper never undershoots,
//! with no separation condition assumed. Refining the generation only nests
//! the interval.

use alloc::vec::Vec;

use crate::math;
use crate::symbolic::CylinderMeasure;

use super::ConformalIFS;

/// A certified interval around a projected measure value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureInterval {
    pub lower: f64,
    pub upper: f64,
    /// Straddling cylinders were refined to relative diameter
    /// `≤ 2^{-resolution_generation}`.
    pub resolution_generation: u32,
    /// The walk finished within its node budget (the bounds are as tight as
    /// this generation allows).
    pub complete: bool,
    /// Complete and usable as a denominator: positive lower bound, or
    /// certified zero.
    pub resolved: bool,
    /// Cylinder-tree nodes examined.
    pub nodes: u64,
}

impl MeasureInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// Query regions the walker understands. Balls are open; annuli are
/// `B(x, r + width) \ B(x, r)`; interval sets are closed unions (1D).
#[derive(Debug, Clone)]
pub enum Region<'a> {
    Ball { center: &'a [f64], radius: f64 },
    Annulus { center: &'a [f64], radius: f64, width: f64 },
    Intervals(&'a [(f64, f64)]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Outside,
    Inside,
    Straddle,
}

impl Region<'_> {
    /// Squared distance extremes from `center` to an axis box.
    fn dist_range(center: &[f64], hull: &[(f64, f64)]) -> (f64, f64) {
        let mut min2 = 0.0f64;
        let mut max2 = 0.0f64;
        for (i, &(lo, hi)) in hull.iter().enumerate() {
            let c = center[i];
            let below = lo - c;
            let above = c - hi;
            let gap = below.max(above).max(0.0);
            min2 += gap * gap;
            let far = (c - lo).abs().max((hi - c).abs());
            max2 += far * far;
        }
        (math::sqrt(min2), math::sqrt(max2))
    }

    fn classify(&self, hull: &[(f64, f64)]) -> Class {
        match self {
            Region::Ball { center, radius } => {
                let (dmin, dmax) = Self::dist_range(center, hull);
                if dmax < *radius {
                    Class::Inside
                } else if dmin >= *radius {
                    Class::Outside
                } else {
                    Class::Straddle
                }
            }
            Region::Annulus {
                center,
                radius,
                width,
            } => {
                let (dmin, dmax) = Self::dist_range(center, hull);
                let outer = radius + width;
                if dmin >= *radius && dmax < outer {
                    Class::Inside
                } else if dmax < *radius || dmin >= outer {
                    Class::Outside
                } else {
                    Class::Straddle
                }
            }
            Region::Intervals(parts) => {
                let (a, b) = hull[0];
                let mut touches = false;
                for &(lo, hi) in parts.iter() {
                    if lo <= a && b <= hi {
                        return Class::Inside;
                    }
                    if a <= hi && lo <= b {
                        touches = true;
                    }
                }
                if touches {
                    Class::Straddle
                } else {
                    Class::Outside
                }
            }
        }
    }
}

/// Budget knobs of the tree walk.
#[derive(Debug, Clone, Copy)]
pub struct WalkParams {
    /// Straddlers are refined to relative diameter `≤ 2^{-generation_cap}`.
    pub generation_cap: u32,
    /// Node ceiling; exceeding it downgrades the result to `resolved=false`
    /// with whatever interval was accumulated (plus the unexplored mass on
    /// the upper side).
    pub node_budget: u64,
    /// Hard recursion-depth guard for slowly contracting families.
    pub max_depth: usize,
}

impl Default for WalkParams {
    fn default() -> Self {
        WalkParams {
            generation_cap: 48,
            node_budget: 1_000_000,
            max_depth: 4096,
        }
    }
}

impl WalkParams {
    pub fn with_generation(generation_cap: u32) -> Self {
        WalkParams {
            generation_cap,
            ..WalkParams::default()
        }
    }
}

struct Walk<'a, M: CylinderMeasure> {
    ifs: &'a ConformalIFS,
    measure: &'a M,
    region: &'a Region<'a>,
    params: WalkParams,
    floor: f64,
    lower: f64,
    upper: f64,
    nodes: u64,
    exhausted: bool,
    word: Vec<u32>,
}

impl<M: CylinderMeasure> Walk<'_, M> {
    fn descend(&mut self, composed: &super::map::Composed, depth: usize) {
        let last = self.word.last().copied();
        let symbols: Vec<u32> = match last {
            None => (0..self.ifs.maps().len() as u32).collect(),
            Some(a) => self.ifs.space().successors(a).collect(),
        };
        for e in symbols {
            self.word.push(e);
            let child_mass = self.measure.mass(&self.word);
            if child_mass > 0.0 {
                let child = self.ifs.extend_composed(composed, e);
                self.visit(&child, child_mass, depth + 1);
            }
            self.word.pop();
        }
    }

    fn visit(&mut self, composed: &super::map::Composed, mass: f64, depth: usize) {
        self.nodes += 1;
        if self.exhausted {
            // Out of budget: remaining mass can only be charged as
            // uncertainty.
            self.upper += mass;
            return;
        }
        let last = self.word.last().copied();
        let hull = self.ifs.composed_hull(composed, last);
        match self.region.classify(&hull) {
            Class::Outside => {}
            Class::Inside => {
                self.lower += mass;
                self.upper += mass;
            }
            Class::Straddle => {
                let diameter = self.ifs.composed_diameter(composed, last);
                if diameter <= self.floor || depth >= self.params.max_depth {
                    self.upper += mass;
                    return;
                }
                if self.nodes >= self.params.node_budget {
                    self.exhausted = true;
                    self.upper += mass;
                    return;
                }
                self.descend(composed, depth);
            }
        }
    }
}

/// Certified bounds on `μ∘π⁻¹(region)` for the projection of `measure`
/// through the coding map of `ifs`.
pub fn region_measure_bounds<M: CylinderMeasure>(
    ifs: &ConformalIFS,
    measure: &M,
    region: &Region<'_>,
    params: WalkParams,
) -> MeasureInterval {
    debug_assert_eq!(measure.space().alphabet_size(), ifs.space().alphabet_size());
    let mut walk = Walk {
        ifs,
        measure,
        region,
        params,
        floor: math::powi(0.5, params.generation_cap as i32),
        lower: 0.0,
        upper: 0.0,
        nodes: 0,
        exhausted: false,
        word: Vec::with_capacity(params.max_depth.min(256)),
    };
    walk.visit(&ifs.identity_composed(), 1.0, 0);
    let complete = !walk.exhausted;
    MeasureInterval {
        lower: walk.lower,
        upper: walk.upper.min(1.0),
        resolution_generation: params.generation_cap,
        complete,
        resolved: complete && (walk.lower > 0.0 || walk.upper == 0.0),
        nodes: walk.nodes,
    }
}

/// Certified bounds on the projected measure of the open ball `B(x, r)`.
pub fn ball_measure_bounds<M: CylinderMeasure>(
    ifs: &ConformalIFS,
    measure: &M,
    center: &[f64],
    radius: f64,
    params: WalkParams,
) -> MeasureInterval {
    region_measure_bounds(
        ifs,
        measure,
        &Region::Ball { center, radius },
        params,
    )
}

/// Certified bounds on the projected measure of the annulus
/// `B(x, r + r^κ) \ B(x, r)` with `κ` evaluated by the caller into an
/// absolute width.
pub fn annulus_measure_bounds<M: CylinderMeasure>(
    ifs: &ConformalIFS,
    measure: &M,
    center: &[f64],
    radius: f64,
    width: f64,
    params: WalkParams,
) -> MeasureInterval {
    region_measure_bounds(
        ifs,
        measure,
        &Region::Annulus {
            center,
            radius,
            width,
        },
        params,
    )
}
