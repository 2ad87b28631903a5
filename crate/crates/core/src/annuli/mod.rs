//! Thin-annuli diagnostics: annulus/ball mass ratios, subpolynomial
//! exponent functions, doubling bounds with their bad sets, bad-radii scans
//! with the measured-vs-bound density comparison, good-radii assembly,
//! radii-class densities, prefix-diameter avoidance masses, and
//! concentration sets.
//!
//! The accounting is conservative throughout: a radius that cannot be
//! certified either way counts as bad, so every reported good-radii density
//! is a lower bound on the true one.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{
    annulus_measure_bounds, ball_measure_bounds, region_measure_bounds, ConformalIFS,
    CylinderCursor, GeometryError, MeasureInterval, Region, WalkParams,
};
use crate::math;
use crate::symbolic::CylinderMeasure;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnnuliError {
    #[error("invalid parameter: {0}")]
    BadParameter(&'static str),

    #[error("quantity could not be resolved: {0}")]
    Unresolved(&'static str),

    #[error("thresholds must decrease strictly")]
    ThresholdsNotDecreasing,

    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Three-valued outcome of an interval-certified inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certified {
    Holds,
    Fails,
    Inconclusive,
}

impl Certified {
    /// Decide `lhs ≤ factor · rhs` from certified intervals: it holds when
    /// even the pessimistic ends satisfy it, fails when even the optimistic
    /// ends violate it.
    pub fn le(lhs: &MeasureInterval, factor: f64, rhs: &MeasureInterval) -> Certified {
        if lhs.upper <= factor * rhs.lower {
            Certified::Holds
        } else if lhs.lower > factor * rhs.upper {
            Certified::Fails
        } else {
            Certified::Inconclusive
        }
    }

    pub fn and(self, other: Certified) -> Certified {
        match (self, other) {
            (Certified::Holds, Certified::Holds) => Certified::Holds,
            (Certified::Fails, _) | (_, Certified::Fails) => Certified::Fails,
            _ => Certified::Inconclusive,
        }
    }
}

/// A subpolynomial exponent function: monotone nonincreasing on `(0, 1]`
/// with `κ(r)·r^ε → 0` for every `ε > 0`. The supported forms are positive
/// constants and `α·lnᵝ(1/r) + c₀`; power-law growth is unrepresentable by
/// construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubpolynomialFn {
    Constant(f64),
    LogPower { alpha: f64, beta: f64, offset: f64 },
}

impl SubpolynomialFn {
    pub fn constant(c: f64) -> Result<Self, AnnuliError> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(AnnuliError::BadParameter("constant form requires c > 0"));
        }
        Ok(SubpolynomialFn::Constant(c))
    }

    pub fn log_power(alpha: f64, beta: f64, offset: f64) -> Result<Self, AnnuliError> {
        if !(alpha > 0.0) || !(beta > 0.0) || !(offset >= 0.0) {
            return Err(AnnuliError::BadParameter(
                "log-power form requires alpha > 0, beta > 0, offset >= 0",
            ));
        }
        Ok(SubpolynomialFn::LogPower {
            alpha,
            beta,
            offset,
        })
    }

    /// Value at radius `r ∈ (0, 1]`.
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            SubpolynomialFn::Constant(c) => c,
            SubpolynomialFn::LogPower {
                alpha,
                beta,
                offset,
            } => alpha * math::powf(math::ln(1.0 / r), beta) + offset,
        }
    }

    /// Value at `r = 2^{-exponent}` without forming `r`, so grids may
    /// descend far below floating-point range.
    pub fn eval_dyadic(&self, exponent: f64) -> f64 {
        match *self {
            SubpolynomialFn::Constant(c) => c,
            SubpolynomialFn::LogPower {
                alpha,
                beta,
                offset,
            } => alpha * math::powf(exponent * core::f64::consts::LN_2, beta) + offset,
        }
    }

    /// `inf_{r ∈ (0,1]} κ(r)`, attained at `r = 1` for both forms.
    pub fn kappa_lower(&self) -> f64 {
        self.eval(1.0)
    }
}

/// Verdict of the decay check `κ(r)·r^ε → 0` along a dyadic grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubpolyVerdict {
    pub epsilon: f64,
    pub pass: bool,
    /// `ln(κ(r)·r^ε)` at the finest grid point.
    pub final_log_value: f64,
}

/// Check `κ(r)·r^ε → 0` for each `ε` along `r = 2^{-j}`, `j` increasing.
/// Log-space evaluation; passing requires the sequence to be nonincreasing
/// past its peak and to finish below `threshold`.
pub fn subpolynomial_check(
    kappa: &SubpolynomialFn,
    epsilons: &[f64],
    grid_exponents: &[f64],
    threshold: f64,
) -> Vec<SubpolyVerdict> {
    let ln_threshold = math::ln(threshold);
    epsilons
        .iter()
        .map(|&eps| {
            let logs: Vec<f64> = grid_exponents
                .iter()
                .map(|&j| math::ln(kappa.eval_dyadic(j)) - eps * j * core::f64::consts::LN_2)
                .collect();
            let peak = argmax(&logs);
            let tail_monotone = logs[peak..].windows(2).all(|w| w[1] <= w[0] + 1e-12);
            let final_log_value = *logs.last().unwrap_or(&f64::INFINITY);
            SubpolyVerdict {
                epsilon: eps,
                pass: tail_monotone && final_log_value < ln_threshold,
                final_log_value,
            }
        })
        .collect()
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// The dyadic exponent grid `j = 1..=j_max`.
pub fn dyadic_exponents(j_max: u32) -> Vec<f64> {
    (1..=j_max).map(|j| j as f64).collect()
}

/// Exponent grid that starts dyadically and then grows geometrically until
/// `κ(2^{-j})·2^{-jε} < threshold` for the smallest `ε` of interest (capped
/// at `j = 10^7`). Small `ε` need depths far beyond `j = 60`; log-space
/// evaluation makes that free.
pub fn adaptive_exponents(kappa: &SubpolynomialFn, eps_min: f64, threshold: f64) -> Vec<f64> {
    let ln_threshold = math::ln(threshold);
    let mut grid: Vec<f64> = (1..=60).map(|j| j as f64).collect();
    let mut j = 60.0f64;
    while math::ln(kappa.eval_dyadic(j)) - eps_min * j * core::f64::consts::LN_2 >= ln_threshold
        && j < 1e7
    {
        j *= 1.25;
        grid.push(j);
    }
    grid
}

/// A doubling bound `G` with its halving factor `γ`:
/// `μ(B(x,2r)) ≤ G(r)·μ(B(x,r))` is the inequality it captures, and
/// `G(r/2) ≤ γ·G(r)` must hold with `γ < 2` on the scales of interest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublingBound {
    form: DoublingForm,
    /// Caller-asserted halving factor used in bound formulas; certify it on
    /// a grid with [`DoublingBound::halving_factor`].
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum DoublingForm {
    /// `max(1⁺, log₂^{2+ε}(1/r))`.
    LogPower { epsilon: f64 },
    /// A constant bound `> 1`.
    Constant { g: f64 },
}

impl DoublingBound {
    /// The standard form `log₂^{2+ε}(1/r)` with an asserted halving factor.
    pub fn log_power(epsilon: f64, gamma: f64) -> Result<Self, AnnuliError> {
        if !(epsilon > 0.0) || !(1.0..2.0).contains(&gamma) {
            return Err(AnnuliError::BadParameter(
                "need epsilon > 0 and gamma in [1, 2)",
            ));
        }
        Ok(DoublingBound {
            form: DoublingForm::LogPower { epsilon },
            gamma,
        })
    }

    pub fn constant(g: f64) -> Result<Self, AnnuliError> {
        if !(g > 1.0) {
            return Err(AnnuliError::BadParameter("constant bound must exceed 1"));
        }
        Ok(DoublingBound {
            form: DoublingForm::Constant { g },
            gamma: 1.0,
        })
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self.form {
            DoublingForm::Constant { g } => g,
            DoublingForm::LogPower { epsilon } => {
                math::powf(math::log2(1.0 / r), 2.0 + epsilon).max(1.0 + 1e-9)
            }
        }
    }

    /// Measured `max G(r/2)/G(r)` over a grid of radii, certifying the
    /// asserted `γ`; errors if `G` increases along the grid.
    pub fn halving_factor(&self, grid: &[f64]) -> Result<f64, AnnuliError> {
        let mut sorted: Vec<f64> = grid.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in sorted.windows(2) {
            if self.eval(w[0]) < self.eval(w[1]) - 1e-12 {
                return Err(AnnuliError::BadParameter(
                    "doubling bound increased along the grid",
                ));
            }
        }
        let mut worst: f64 = 1.0;
        for &r in grid {
            worst = worst.max(self.eval(r / 2.0) / self.eval(r));
        }
        Ok(worst)
    }
}

/// The ratio `μ(B(x, r + r^{κ(r)}) \ B(x, r)) / μ(B(x, r))` as a certified
/// interval.
#[derive(Debug, Clone, Copy)]
pub struct RatioInterval {
    pub lower: f64,
    /// `+∞` when the ball mass cannot be bounded away from zero.
    pub upper: f64,
    pub resolved: bool,
    pub ball: MeasureInterval,
    pub annulus: MeasureInterval,
}

/// Thin-annuli ratio at `(x, r)` for the exponent function `κ`.
pub fn thin_annuli_ratio<M: CylinderMeasure>(
    ifs: &ConformalIFS,
    measure: &M,
    x: &[f64],
    r: f64,
    kappa: &SubpolynomialFn,
    params: WalkParams,
) -> RatioInterval {
    let width = math::powf(r, kappa.eval(r));
    let ball = ball_measure_bounds(ifs, measure, x, r, params);
    let annulus = annulus_measure_bounds(ifs, measure, x, r, width, params);
    ratio_of(annulus, ball)
}

fn ratio_of(annulus: MeasureInterval, ball: MeasureInterval) -> RatioInterval {
    if ball.lower <= 0.0 {
        return RatioInterval {
            lower: 0.0,
            upper: f64::INFINITY,
            resolved: false,
            ball,
            annulus,
        };
    }
    // Resolution needs the denominator bounded away from zero and both
    // walks complete; the annulus interval itself may well be [0, ε].
    RatioInterval {
        lower: annulus.lower / ball.upper,
        upper: annulus.upper / ball.lower,
        resolved: ball.complete && annulus.complete,
        ball,
        annulus,
    }
}

/// Which `α_n` sequence the bad-set membership test uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaSequence {
    /// `α_n = n^{−1−ε/2}` (default).
    Power,
    /// `α_n = 1/(n ln² n)` (refined variant).
    LogSquared,
}

impl AlphaSequence {
    pub fn eval(&self, n: u32, epsilon: f64) -> f64 {
        let nf = n as f64;
        match self {
            AlphaSequence::Power => math::powf(nf, -1.0 - epsilon / 2.0),
            AlphaSequence::LogSquared => {
                let l = math::ln(nf).max(1e-9);
                1.0 / (nf * l * l)
            }
        }
    }
}

/// Per-radius outcome of the doubling diagnostics.
#[derive(Debug, Clone)]
pub struct DoublingRow {
    pub r: f64,
    /// `μ(B(x,2r)) ≤ log₂^{2+ε}(1/r)·μ(B(x,r))`.
    pub doubling: Certified,
    /// Shell comparison at `s = 2^{-k}`, `k = [−log₂ r]`:
    /// `k^{−1−ε} μ(B(x,r)) ≤ μ(B(x,s)) ≤ k^{1+ε} μ(B(x,r))`.
    pub shell: Certified,
    /// Membership in the level-`k` bad set
    /// `μ(B(x,2^{−k}))·α_k > μ(B(x,2^{−k−1}))`.
    pub bad_set_member: Certified,
    pub ball: MeasureInterval,
    pub double_ball: MeasureInterval,
}

/// Dyadic block index `k` with `2^{-k-1} < r ≤ 2^{-k}`, robust to radii
/// sitting on block boundaries in floating point.
pub fn dyadic_block(r: f64) -> u32 {
    let kf = -math::log2(r);
    let rounded = math::round(kf);
    let k = if (kf - rounded).abs() < 1e-9 {
        rounded
    } else {
        math::floor(kf)
    };
    if k < 1.0 {
        1
    } else {
        k as u32
    }
}

/// Doubling report over a radius grid at one point.
pub fn doubling_report<M: CylinderMeasure>(
    ifs: &ConformalIFS,
    measure: &M,
    x: &[f64],
    r_grid: &[f64],
    epsilon: f64,
    alpha: AlphaSequence,
    params: WalkParams,
) -> Vec<DoublingRow> {
    let g = DoublingBound::log_power(epsilon, 1.9).unwrap();
    r_grid
        .iter()
        .map(|&r| {
            let ball = ball_measure_bounds(ifs, measure, x, r, params);
            let double_ball = ball_measure_bounds(ifs, measure, x, 2.0 * r, params);
            let doubling = Certified::le(&double_ball, g.eval(r), &ball);
            let k = dyadic_block(r);
            let s = math::powi(0.5, k as i32);
            let shell = if s == r {
                // With s = r both shell inequalities are tautologies
                // (k^{−1−ε} ≤ 1 ≤ k^{1+ε}).
                Certified::Holds
            } else {
                let shell_ball = ball_measure_bounds(ifs, measure, x, s, params);
                let kf = k as f64;
                Certified::le(
                    &scale_interval(&ball, math::powf(kf, -1.0 - epsilon)),
                    1.0,
                    &shell_ball,
                )
                .and(Certified::le(
                    &shell_ball,
                    math::powf(kf, 1.0 + epsilon),
                    &ball,
                ))
            };
            let b_n = ball_measure_bounds(ifs, measure, x, math::powi(0.5, k as i32), params);
            let b_n1 =
                ball_measure_bounds(ifs, measure, x, math::powi(0.5, k as i32 + 1), params);
            // Membership is the strict reverse of the certified "≤".
            let bad_set_member =
                match Certified::le(&scale_interval(&b_n, alpha.eval(k, epsilon)), 1.0, &b_n1) {
                    Certified::Holds => Certified::Fails,
                    Certified::Fails => Certified::Holds,
                    Certified::Inconclusive => Certified::Inconclusive,
                };
            DoublingRow {
                r,
                doubling,
                shell,
                bad_set_member,
                ball,
                double_ball,
            }
        })
        .collect()
}

fn scale_interval(m: &MeasureInterval, factor: f64) -> MeasureInterval {
    MeasureInterval {
        lower: m.lower * factor,
        upper: m.upper * factor,
        ..*m
    }
}

/// A finite union of half-open radius intervals `(a, b] ⊆ (0, 1]`, kept
/// sorted, disjoint, and merged. Endpoint arithmetic is plain f64, which is
/// exact on the dyadic grids every scan uses.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RadiiSet {
    parts: Vec<(f64, f64)>,
}

impl RadiiSet {
    pub fn empty() -> Self {
        RadiiSet::default()
    }

    /// The full set `(0, eta]`.
    pub fn full(eta: f64) -> Self {
        RadiiSet {
            parts: vec![(0.0, eta)],
        }
    }

    pub fn from_intervals(intervals: &[(f64, f64)]) -> Result<Self, AnnuliError> {
        let mut parts: Vec<(f64, f64)> =
            intervals.iter().copied().filter(|&(a, b)| b > a).collect();
        if parts
            .iter()
            .any(|&(a, b)| a < 0.0 || b > 1.0 || !a.is_finite() || !b.is_finite())
        {
            return Err(AnnuliError::BadParameter(
                "radius intervals must sit inside (0, 1]",
            ));
        }
        parts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(parts.len());
        for (a, b) in parts {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Ok(RadiiSet { parts: merged })
    }

    pub fn parts(&self) -> &[(f64, f64)] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.parts.iter().map(|&(a, b)| b - a).sum()
    }

    /// Lebesgue measure of the part below `r`: `l(T ∩ (0, r])`.
    pub fn length_upto(&self, r: f64) -> f64 {
        self.parts
            .iter()
            .map(|&(a, b)| (b.min(r) - a).max(0.0))
            .sum()
    }

    /// `l(T ∩ (0, r]) / r`.
    pub fn density(&self, r: f64) -> f64 {
        self.length_upto(r) / r
    }

    pub fn union(&self, other: &RadiiSet) -> RadiiSet {
        let mut all = self.parts.clone();
        all.extend_from_slice(&other.parts);
        RadiiSet::from_intervals(&all).unwrap()
    }

    /// `(0, upper] \ self`.
    pub fn complement_within(&self, upper: f64) -> RadiiSet {
        let mut out = Vec::new();
        let mut cursor = 0.0f64;
        for &(a, b) in &self.parts {
            if a >= upper {
                break;
            }
            if a > cursor {
                out.push((cursor, a.min(upper)));
            }
            cursor = cursor.max(b);
        }
        if cursor < upper {
            out.push((cursor, upper));
        }
        RadiiSet { parts: out }
    }

    /// Restriction `self ∩ (lo, hi]`.
    pub fn intersect_band(&self, lo: f64, hi: f64) -> RadiiSet {
        let parts: Vec<(f64, f64)> = self
            .parts
            .iter()
            .filter_map(|&(a, b)| {
                let na = a.max(lo);
                let nb = b.min(hi);
                if nb > na {
                    Some((na, nb))
                } else {
                    None
                }
            })
            .collect();
        RadiiSet { parts }
    }
}

/// A scan grid over radii: contiguous cells `(lo, hi]` descending in scale,
/// each carrying the representative radius at which ratios are evaluated.
/// The grid specification travels with every report so scans reproduce
/// bit-for-bit.
#[derive(Debug, Clone)]
pub struct RadiiGrid {
    /// `(cell_lo, cell_hi, representative)` with `cell_lo < rep ≤ cell_hi`,
    /// descending.
    pub cells: Vec<(f64, f64, f64)>,
}

impl RadiiGrid {
    /// Dyadic cells `(2^{-j-1}, 2^{-j}]` for `j` in the inclusive range,
    /// with optional seeded jitter of the representative inside the cell.
    pub fn dyadic(j_min: u32, j_max: u32, jitter: Option<u64>) -> Self {
        let mut rng = jitter.map(|seed| crate::rng::stream(seed, 0));
        let mut cells = Vec::new();
        for j in j_min..=j_max {
            let hi = math::powi(0.5, j as i32);
            let lo = hi / 2.0;
            let rep = match rng.as_mut() {
                None => hi,
                Some(r) => {
                    let u = crate::rng::uniform(r);
                    lo + (0.1 + 0.8 * u) * (hi - lo)
                }
            };
            cells.push((lo, hi, rep));
        }
        RadiiGrid { cells }
    }

    /// Cells from explicit decreasing representatives: cell `(next, r]` per
    /// representative, the last one reaching half its representative.
    pub fn from_representatives(reps: &[f64]) -> Result<Self, AnnuliError> {
        if reps.is_empty() || reps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(AnnuliError::ThresholdsNotDecreasing);
        }
        let mut cells = Vec::new();
        for (i, &r) in reps.iter().enumerate() {
            let lo = if i + 1 < reps.len() {
                reps[i + 1]
            } else {
                r / 2.0
            };
            cells.push((lo, r, r));
        }
        Ok(RadiiGrid { cells })
    }

    pub fn representatives(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.2).collect()
    }
}

/// One cell of a bad-radii scan: `Holds` certifies membership in the bad
/// set (ratio > A), `Fails` certifies exclusion, `Inconclusive` is charged
/// to the bad set.
#[derive(Debug, Clone)]
pub struct BadRadiiCell {
    pub cell: (f64, f64),
    pub r: f64,
    pub verdict: Certified,
    pub ratio: RatioInterval,
}

/// Scale row comparing the measured bad-radii length with the density bound
/// `(2 / ((1 − γ/2) ln(1 + A))) · r^{κ(r)} · ln G(r)`.
#[derive(Debug, Clone, Copy)]
pub struct BadRadiiBoundRow {
    pub r: f64,
    pub measured: f64,
    pub bound: f64,
}

/// Result of a bad-radii scan at one point.
#[derive(Debug, Clone)]
pub struct BadRadiiScan {
    pub a: f64,
    /// Conservative bad set: certified-bad plus inconclusive cells.
    pub bad: RadiiSet,
    pub rows: Vec<BadRadiiCell>,
    pub bound_rows: Vec<BadRadiiBoundRow>,
    /// Whether `inf κ > 1`, the hypothesis under which the density bound is
    /// meaningful.
    pub kappa_hypothesis_met: bool,
}

/// Scan a radius grid for the bad set of radii whose thin-annuli ratio
/// exceeds `A`; report measured bad length against the density bound.
#[allow(clippy::too_many_arguments)]
pub fn bad_radii_scan<M: CylinderMeasure>(
    ifs: &ConformalIFS,
    measure: &M,
    x: &[f64],
    a: f64,
    kappa: &SubpolynomialFn,
    grid: &RadiiGrid,
    g: &DoublingBound,
    params: WalkParams,
) -> Result<BadRadiiScan, AnnuliError> {
    if !(a > 0.0) {
        return Err(AnnuliError::BadParameter("threshold A must be positive"));
    }
    let mut rows = Vec::with_capacity(grid.cells.len());
    let mut bad_parts = Vec::new();
    for &(lo, hi, rep) in &grid.cells {
        let ratio = thin_annuli_ratio(ifs, measure, x, rep, kappa, params);
        let verdict = if ratio.lower > a {
            Certified::Holds
        } else if ratio.resolved && ratio.upper <= a {
            Certified::Fails
        } else {
            Certified::Inconclusive
        };
        if verdict != Certified::Fails {
            bad_parts.push((lo, hi));
        }
        rows.push(BadRadiiCell {
            cell: (lo, hi),
            r: rep,
            verdict,
            ratio,
        });
    }
    let bad = RadiiSet::from_intervals(&bad_parts)?;
    let prefactor = 2.0 / ((1.0 - g.gamma / 2.0) * math::ln(1.0 + a));
    let bound_rows = grid
        .cells
        .iter()
        .map(|&(_, hi, _)| BadRadiiBoundRow {
            r: hi,
            measured: bad.length_upto(hi),
            bound: prefactor * math::powf(hi, kappa.eval(hi)) * math::ln(g.eval(hi)),
        })
        .collect();
    Ok(BadRadiiScan {
        a,
        bad,
        rows,
        bound_rows,
        kappa_hypothesis_met: kappa.kappa_lower() > 1.0,
    })
}

/// Nesting check for scans at two thresholds on the same grid: every cell
/// certified bad at the looser (larger) threshold must be bad at the
/// tighter one.
pub fn bad_sets_nested(looser: &BadRadiiScan, tighter: &BadRadiiScan) -> bool {
    looser
        .rows
        .iter()
        .zip(&tighter.rows)
        .all(|(hi, lo)| hi.verdict != Certified::Holds || lo.verdict == Certified::Holds)
}

/// One layer of the good-radii construction: the bad set scanned at
/// threshold `a`, applied on scales `≤ r_upper`.
#[derive(Debug, Clone)]
pub struct BadRadiiLayer {
    pub a: f64,
    pub r_upper: f64,
    pub bad: RadiiSet,
}

/// Good radii and their density profile.
#[derive(Debug, Clone)]
pub struct GoodRadiiReport {
    pub good: RadiiSet,
    pub bad: RadiiSet,
    /// `(r, l(good ∩ (0, r])/r)` per profile scale.
    pub profile: Vec<(f64, f64)>,
    pub beta_thick: bool,
}

/// Assemble good radii from per-threshold scans: the bad set is the union
/// of each layer's bad radii restricted to its scale band `(r_{n+1}, r_n]`,
/// and the good set is the complement within `(0, r_1]`. Inconclusive radii
/// were already charged to the layers' bad sets, so the reported density is
/// a certified lower bound.
pub fn good_radii_construct(
    layers: &[BadRadiiLayer],
    profile_grid: &[f64],
    beta: f64,
    beta_thick_threshold: f64,
) -> Result<GoodRadiiReport, AnnuliError> {
    if layers.is_empty() {
        return Err(AnnuliError::BadParameter("need at least one layer"));
    }
    if layers.windows(2).any(|w| w[1].r_upper >= w[0].r_upper) {
        return Err(AnnuliError::ThresholdsNotDecreasing);
    }
    let r1 = layers[0].r_upper;
    let mut bad = RadiiSet::empty();
    for (i, layer) in layers.iter().enumerate() {
        let band_lo = if i + 1 < layers.len() {
            layers[i + 1].r_upper
        } else {
            0.0
        };
        bad = bad.union(&layer.bad.intersect_band(band_lo, layer.r_upper));
    }
    let good = bad.complement_within(r1);
    let profile: Vec<(f64, f64)> = profile_grid
        .iter()
        .filter(|&&r| r <= r1)
        .map(|&r| (r, good.density(r)))
        .collect();
    let beta_thick = beta_thick_flag(&profile, beta, beta_thick_threshold);
    Ok(GoodRadiiReport {
        good,
        bad,
        profile,
        beta_thick,
    })
}

/// β-thickness along a density profile: `|density(r) − 1| / r^{lnᵝ(1/r)}`
/// must decay monotonically past its peak and finish below the threshold.
/// Log-space evaluation (the denominator underflows early).
pub fn beta_thick_flag(profile: &[(f64, f64)], beta: f64, threshold: f64) -> bool {
    if profile.is_empty() {
        return false;
    }
    let logs: Vec<f64> = profile
        .iter()
        .map(|&(r, density)| {
            let defect = (density - 1.0).abs();
            let ln_defect = if defect == 0.0 {
                f64::NEG_INFINITY
            } else {
                math::ln(defect)
            };
            // ln(defect / r^{ln^β(1/r)}) = ln defect + ln^{β+1}(1/r).
            ln_defect + math::powf(math::ln(1.0 / r), beta + 1.0)
        })
        .collect();
    let peak = argmax(&logs);
    let tail_monotone = logs[peak..].windows(2).all(|w| w[1] <= w[0] + 1e-12);
    tail_monotone && *logs.last().unwrap() < math::ln(threshold)
}

/// Radii-class flags of a finitely represented set.
#[derive(Debug, Clone)]
pub struct RadiiClassReport {
    pub profile: Vec<(f64, f64)>,
    /// Contains a full initial segment `(0, η]`.
    pub almost_full: bool,
    /// Density within `1e-3` of 1 at the finest tested scale.
    pub dense: bool,
    /// `|density − 1|/r^α → 0` for `α ∈ {1/4, 1/2, 1}`.
    pub super_dense: bool,
    pub beta_thick: bool,
}

/// Exact density `l(T ∩ (0, r])/r` at one radius.
pub fn radii_class_density(t: &RadiiSet, r: f64) -> f64 {
    t.density(r)
}

/// Classify a radii set along a decreasing grid.
pub fn classify_radii(t: &RadiiSet, grid: &[f64], beta: f64, threshold: f64) -> RadiiClassReport {
    let profile: Vec<(f64, f64)> = grid.iter().map(|&r| (r, t.density(r))).collect();
    let almost_full = t
        .parts()
        .first()
        .map(|&(a, b)| a == 0.0 && b > 0.0)
        .unwrap_or(false);
    let dense = profile
        .last()
        .map(|&(_, d)| (d - 1.0).abs() <= 1e-3)
        .unwrap_or(false);
    let super_dense = [0.25f64, 0.5, 1.0].iter().all(|&alpha| {
        let logs: Vec<f64> = profile
            .iter()
            .map(|&(r, d)| {
                let defect = (d - 1.0).abs();
                let ln_defect = if defect == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    math::ln(defect)
                };
                ln_defect - alpha * math::ln(r)
            })
            .collect();
        let peak = argmax(&logs);
        logs[peak..].windows(2).all(|w| w[1] <= w[0] + 1e-12)
            && *logs.last().unwrap() < math::ln(threshold)
    });
    let beta_thick = beta_thick_flag(&profile, beta, threshold);
    RadiiClassReport {
        profile,
        almost_full,
        dense,
        super_dense,
        beta_thick,
    }
}

/// Mass of the sequences none of whose prefix diameters falls in the open
/// window `(a, b)`, by pruned traversal: a subtree is wholly in once its
/// diameter drops to `a` or below (diameters strictly decrease along
/// branches), wholly out as soon as a prefix diameter lands in the window.
#[derive(Debug, Clone, Copy)]
pub struct TabMeasure {
    pub lower: f64,
    pub upper: f64,
    /// Traversal completed: `lower == upper` is the exact mass.
    pub exact: bool,
    pub nodes: u64,
}

pub fn tab_measure<M: CylinderMeasure>(
    ifs: &ConformalIFS,
    measure: &M,
    a: f64,
    b: f64,
    diam_x: f64,
    depth_cap: usize,
) -> Result<TabMeasure, AnnuliError> {
    if !(0.0 < a && a < b && b <= diam_x) {
        return Err(AnnuliError::BadParameter("need 0 < A < B <= diam(X)"));
    }
    let mut walk = TabWalk {
        ifs,
        measure,
        a,
        b,
        diam_x,
        depth_cap,
        word: Vec::new(),
        included: 0.0,
        unresolved: 0.0,
        nodes: 0,
    };
    walk.go(&ifs.root_cursor());
    Ok(TabMeasure {
        lower: walk.included,
        upper: walk.included + walk.unresolved,
        exact: walk.unresolved == 0.0,
        nodes: walk.nodes,
    })
}

struct TabWalk<'w, M: CylinderMeasure> {
    ifs: &'w ConformalIFS,
    measure: &'w M,
    a: f64,
    b: f64,
    diam_x: f64,
    depth_cap: usize,
    word: Vec<u32>,
    included: f64,
    unresolved: f64,
    nodes: u64,
}

impl<M: CylinderMeasure> TabWalk<'_, M> {
    fn go(&mut self, cursor: &CylinderCursor) {
        let symbols: Vec<u32> = match self.word.last() {
            None => (0..self.ifs.maps().len() as u32).collect(),
            Some(&s) => self.ifs.space().successors(s).collect(),
        };
        for e in symbols {
            self.word.push(e);
            let mass = self.measure.mass(&self.word);
            if mass > 0.0 {
                self.nodes += 1;
                let child = self.ifs.extend_cursor(cursor, e);
                let d = self.ifs.cursor_diameter(&child, Some(e)) * self.diam_x;
                if d <= self.a {
                    self.included += mass;
                } else if d < self.b {
                    // Prefix diameter inside (A, B): subtree excluded.
                } else if self.word.len() >= self.depth_cap {
                    self.unresolved += mass;
                } else {
                    self.go(&child);
                }
            }
            self.word.pop();
        }
    }
}

/// The shape `(A/B)^β · ln(diam X / A)` of the avoidance-mass bound; the
/// multiplicative constant is not explicit, so reports compare the measured
/// mass to this shape across scales.
pub fn tab_bound_shape(a: f64, b: f64, beta: f64, diam_x: f64) -> f64 {
    math::powf(a / b, beta) * math::ln(diam_x / a)
}

/// Monte-Carlo report on the mass of the concentration set
/// `S(F, c, ρ) = {x : ν(B(x,ρ) ∩ F) > c·ν(B(x,ρ))·ν(F)}`, with
/// interval-certified membership per sampled point.
#[derive(Debug, Clone)]
pub struct ConcentrationReport {
    pub members: usize,
    pub non_members: usize,
    pub inconclusive: usize,
    pub samples: usize,
    /// Certified membership rate (members / samples).
    pub estimate: f64,
    /// The covering-multiplicity bound `M_d / c` it is compared against.
    pub besicovitch_bound: f64,
    pub nu_f: MeasureInterval,
}

/// Besicovitch covering constant by dimension: exactly 2 in dimension 1, a
/// documented literature placeholder otherwise (comparisons in `d ≥ 2` are
/// diagnostics, not certifications).
pub fn besicovitch_constant(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 19.0,
        d => 2.0 * math::powf(4.5, d as f64),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn concentration_set_mass<M: CylinderMeasure>(
    ifs: &ConformalIFS,
    measure: &M,
    f_set: &[(f64, f64)],
    c: f64,
    rho: f64,
    sample_count: usize,
    seed: u64,
    params: WalkParams,
) -> Result<ConcentrationReport, AnnuliError> {
    if ifs.dim() != 1 {
        return Err(AnnuliError::BadParameter(
            "concentration sets are implemented for 1D ambients",
        ));
    }
    if !(c > 0.0 && rho > 0.0) || sample_count == 0 {
        return Err(AnnuliError::BadParameter(
            "need c > 0, rho > 0 and a positive sample count",
        ));
    }
    let nu_f = region_measure_bounds(ifs, measure, &Region::Intervals(f_set), params);
    if !(nu_f.lower > 0.0) {
        return Err(AnnuliError::Unresolved(
            "nu(F) is not certified positive at this resolution",
        ));
    }
    let mut rng = crate::rng::stream(seed, 0);
    let mut members = 0usize;
    let mut non_members = 0usize;
    let mut inconclusive = 0usize;
    for _ in 0..sample_count {
        let x = ifs.sample_point(measure, &mut rng, 1e-13);
        let ball = ball_measure_bounds(ifs, measure, &x, rho, params);
        let bx = (x[0] - rho, x[0] + rho);
        let clipped: Vec<(f64, f64)> = f_set
            .iter()
            .filter_map(|&(lo, hi)| {
                let na = lo.max(bx.0);
                let nb = hi.min(bx.1);
                if nb > na {
                    Some((na, nb))
                } else {
                    None
                }
            })
            .collect();
        let ball_and_f =
            region_measure_bounds(ifs, measure, &Region::Intervals(&clipped), params);
        if ball_and_f.lower > c * ball.upper * nu_f.upper {
            members += 1;
        } else if ball_and_f.upper <= c * ball.lower * nu_f.lower {
            non_members += 1;
        } else {
            inconclusive += 1;
        }
    }
    Ok(ConcentrationReport {
        members,
        non_members,
        inconclusive,
        samples: sample_count,
        estimate: members as f64 / sample_count as f64,
        besicovitch_bound: besicovitch_constant(ifs.dim()) / c,
        nu_f,
    })
}
