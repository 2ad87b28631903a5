//! Entry/return-time statistics: exact Markov survival oracles, the
//! a_N/b_N/c(U)/d(U) error budget bounding the distance to the exponential
//! law, empirical entry/return experiments with Kolmogorov–Smirnov
//! distances, correlation-decay probes, pointwise dimensions, and
//! no-small-returns certification.

mod orbit;

pub use orbit::{
    empirical_entry_law, empirical_return_law, sample_path, EmpiricalParams, WindowTarget,
};

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{ball_measure_bounds, ConformalIFS, PiecewiseMap1d, WalkParams};
use crate::math;
use crate::symbolic::{CylinderMeasure, SymbolicError, Word};
use crate::thermo::{BlockChain, MarkovMeasure, ThermoError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReturnsError {
    #[error("target has zero mass")]
    ZeroMassTarget,

    #[error("target words must be nonempty and share one length")]
    MalformedTarget,

    #[error("empty sample")]
    EmptySample,

    #[error("rejection sampling failed after {attempts} attempts")]
    RejectionFailure { attempts: u64 },

    #[error("invalid parameter: {0}")]
    BadParameter(&'static str),

    #[error(transparent)]
    Thermo(#[from] ThermoError),

    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

/// A survival sequence `s_k`, `k = 1..=K` (with `s_0 = 1` implicit):
/// `μ(τ > k)` for entry curves, `μ_U(τ > k)` for return curves.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalCurve {
    pub values: Vec<f64>,
    pub exact: bool,
}

impl SurvivalCurve {
    /// `s_k`; `k = 0` gives 1.
    pub fn get(&self, k: usize) -> f64 {
        if k == 0 {
            1.0
        } else {
            self.values[k - 1]
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_nonincreasing(&self) -> bool {
        let mut prev = 1.0f64;
        self.values.iter().all(|&s| {
            let ok = s <= prev + 1e-15;
            prev = s;
            ok
        })
    }
}

/// Exact survival data for a Markov chain and a union-of-cylinders target,
/// with the recoded block chain retained for mixing-distance queries.
#[derive(Debug, Clone)]
pub struct SurvivalOracle {
    pub entry: SurvivalCurve,
    pub ret: SurvivalCurve,
    pub mu_u: f64,
    chain: BlockChain,
    in_target: Vec<bool>,
}

/// Exact entry and return survival curves of a Markov measure for a target
/// that is a union of cylinders of a common length, by substochastic
/// evolution of the recoded block chain.
pub fn markov_survival(
    measure: &MarkovMeasure,
    targets: &[Word],
    k_max: usize,
) -> Result<SurvivalOracle, ReturnsError> {
    if targets.is_empty() || targets.iter().any(|w| w.is_empty()) {
        return Err(ReturnsError::MalformedTarget);
    }
    let block_len = targets[0].len();
    if targets.iter().any(|w| w.len() != block_len) {
        return Err(ReturnsError::MalformedTarget);
    }
    let chain = measure.block_chain(block_len)?;
    let s = chain.states.len();
    let mut in_target = vec![false; s];
    for w in targets {
        if let Some(&i) = chain.index.get(&w.0) {
            in_target[i] = true;
        }
    }
    let mu_u: f64 = (0..s)
        .filter(|&i| in_target[i])
        .map(|i| chain.stationary[i])
        .sum();
    if mu_u <= 0.0 {
        return Err(ReturnsError::ZeroMassTarget);
    }
    let evolve = |start: Vec<f64>| -> SurvivalCurve {
        let mut v = start;
        let mut values = Vec::with_capacity(k_max);
        for _ in 0..k_max {
            let mut next = vec![0.0; s];
            for (u, &mass) in v.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                for x in 0..s {
                    let p = chain.transition[u * s + x];
                    if p > 0.0 && !in_target[x] {
                        next[x] += mass * p;
                    }
                }
            }
            values.push(next.iter().sum());
            v = next;
        }
        SurvivalCurve {
            values,
            exact: true,
        }
    };
    let entry = evolve(chain.stationary.clone());
    let conditional: Vec<f64> = (0..s)
        .map(|i| {
            if in_target[i] {
                chain.stationary[i] / mu_u
            } else {
                0.0
            }
        })
        .collect();
    let ret = evolve(conditional);
    Ok(SurvivalOracle {
        entry,
        ret,
        mu_u,
        chain,
        in_target,
    })
}

impl SurvivalOracle {
    /// Exact mixing distance at lag `N`: the total-variation distance
    /// between the `N`-step law started from the conditioned target and the
    /// stationary law. The supremum over measurable sets is attained by
    /// collecting the states where the conditioned law exceeds the
    /// stationary one, and because both processes run the same kernel, this
    /// state-marginal distance equals the distance over all future events.
    pub fn exact_b_n(&self, n: usize) -> f64 {
        let s = self.chain.states.len();
        let mut v: Vec<f64> = (0..s)
            .map(|i| {
                if self.in_target[i] {
                    self.chain.stationary[i] / self.mu_u
                } else {
                    0.0
                }
            })
            .collect();
        for _ in 0..n {
            let mut next = vec![0.0; s];
            for (u, &mass) in v.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                for x in 0..s {
                    let p = self.chain.transition[u * s + x];
                    if p > 0.0 {
                        next[x] += mass * p;
                    }
                }
            }
            v = next;
        }
        (0..s)
            .map(|i| (v[i] - self.chain.stationary[i]).max(0.0))
            .sum()
    }
}

/// The error budget for the exponential law: `a_N = μ_U(τ ≤ N)`, a mixing
/// distance `b_N`, the survival gap `c(U) = sup_k |μ_U(τ > k) − μ(τ > k)|`,
/// and the resulting distance bound `d(U) = 4μ(U) + c(1 − ln c)`.
#[derive(Debug, Clone)]
pub struct HsvReport {
    pub mu_u: f64,
    /// `a_N`, indexed from `N = 1`.
    pub a_n: Vec<f64>,
    /// `b_N`, indexed from `N = 1`.
    pub b_n: Vec<f64>,
    /// `c(k, U)`, indexed from `k = 1`.
    pub c_k: Vec<f64>,
    pub c: f64,
    pub d: f64,
    /// `argmin_N (a_N + b_N + N μ(U))`, 1-based.
    pub best_n: usize,
    /// The minimised budget value (an upper bound for `c(U)`).
    pub best_bound: f64,
    /// Diagnostic pair from the lag-choice recipe `n_r = μ(U)^{−θ}`.
    pub theta: f64,
    pub n_r: f64,
}

/// Where the mixing distances come from.
pub enum BnSource<'a> {
    /// Exact from the oracle's block chain.
    Exact(&'a SurvivalOracle),
    /// Externally estimated values (`b_N` for `N = 1..`), e.g. from a
    /// cylinder-union maximisation at a fixed generation; treated as given.
    Estimate(&'a [f64]),
}

/// Default exponent in the diagnostic lag recipe.
pub const DEFAULT_THETA: f64 = 0.1;

/// Assemble the error budget from entry/return survival curves.
pub fn hsv_quantities(
    entry: &SurvivalCurve,
    ret: &SurvivalCurve,
    mu_u: f64,
    b_n_source: BnSource<'_>,
    n_max: usize,
) -> Result<HsvReport, ReturnsError> {
    if entry.is_empty() || ret.is_empty() || entry.len() != ret.len() {
        return Err(ReturnsError::BadParameter(
            "need entry and return curves of a common positive length",
        ));
    }
    if !(mu_u > 0.0) {
        return Err(ReturnsError::ZeroMassTarget);
    }
    let k_max = entry.len();
    let n_max = n_max.min(k_max).max(1);
    let c_k: Vec<f64> = (1..=k_max)
        .map(|k| ret.get(k) - entry.get(k))
        .collect();
    let c = c_k.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    let d = 4.0 * mu_u + if c == 0.0 { 0.0 } else { c * (1.0 - math::ln(c)) };
    let a_n: Vec<f64> = (1..=n_max).map(|n| 1.0 - ret.get(n)).collect();
    let b_n: Vec<f64> = match b_n_source {
        BnSource::Exact(oracle) => (1..=n_max).map(|n| oracle.exact_b_n(n)).collect(),
        BnSource::Estimate(values) => {
            if values.len() < n_max {
                return Err(ReturnsError::BadParameter(
                    "estimated b_N list shorter than the requested range",
                ));
            }
            values[..n_max].to_vec()
        }
    };
    let mut best_n = 1;
    let mut best_bound = f64::INFINITY;
    for n in 1..=n_max {
        let bound = a_n[n - 1] + b_n[n - 1] + n as f64 * mu_u;
        if bound < best_bound {
            best_bound = bound;
            best_n = n;
        }
    }
    Ok(HsvReport {
        mu_u,
        a_n,
        b_n,
        c_k,
        c,
        d,
        best_n,
        best_bound,
        theta: DEFAULT_THETA,
        n_r: math::powf(mu_u, -DEFAULT_THETA),
    })
}

/// Exact supremum distance between a normalized survival step function and
/// the exponential tail: `sup_{t ≥ 0} |s_{⌊t/μ⌋} − e^{−t}|`, evaluated at
/// both one-sided limits of every step and including an upper bound for the
/// tail beyond the curve (so the result upper-bounds the true supremum).
pub fn survival_sup_distance(curve: &SurvivalCurve, mu_u: f64) -> f64 {
    let mut sup = 0.0f64;
    let k_max = curve.len();
    for k in 0..=k_max {
        let s = curve.get(k);
        let left = math::exp(-(k as f64) * mu_u);
        let right = math::exp(-((k + 1) as f64) * mu_u);
        sup = sup.max((s - left).abs()).max((s - right).abs());
    }
    let tail = curve
        .get(k_max)
        .max(math::exp(-((k_max + 1) as f64) * mu_u));
    sup.max(tail)
}

/// An empirical distribution of normalized times.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    /// Sorted normalized times `τ_i · μ(U)`.
    pub times: Vec<f64>,
    /// Observations that outlived the horizon (treated as mass beyond the
    /// largest jump and reported separately).
    pub censored: usize,
}

impl Ecdf {
    pub fn new(mut times: Vec<f64>, censored: usize) -> Self {
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ecdf { times, censored }
    }

    pub fn total(&self) -> usize {
        self.times.len() + self.censored
    }

    pub fn censored_fraction(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            self.censored as f64 / self.total() as f64
        }
    }

    /// Empirical survival fraction strictly above `t` (censored mass counts
    /// as surviving).
    pub fn survival_above(&self, t: f64) -> f64 {
        let above = self.times.iter().filter(|&&x| x > t).count() + self.censored;
        above as f64 / self.total() as f64
    }
}

/// Exact Kolmogorov–Smirnov distance between the empirical law and the unit
/// exponential: the supremum over jump points of both one-sided deviations,
/// plus the limit deviation carried by censored mass.
pub fn ks_exponential(ecdf: &Ecdf) -> Result<f64, ReturnsError> {
    let n = ecdf.total();
    if n == 0 {
        return Err(ReturnsError::EmptySample);
    }
    let nf = n as f64;
    let mut sup = 0.0f64;
    for (i, &t) in ecdf.times.iter().enumerate() {
        let target = 1.0 - math::exp(-t);
        let before = i as f64 / nf;
        let after = (i + 1) as f64 / nf;
        sup = sup.max((before - target).abs()).max((after - target).abs());
    }
    // As t → ∞ the empirical cdf tops out below 1 by the censored fraction.
    sup = sup.max(ecdf.censored as f64 / nf);
    Ok(sup)
}

/// The three-piece ramp `φ_r^{(α)}`: 1 up to `r`, linear down to 0 across
/// `[r, r + r^α]`, 0 beyond. Lipschitz with constant `r^{−α}`, squeezed
/// between the indicators of `B(x, r)` and `B(x, r + r^α)`.
pub fn bump_eval(r: f64, alpha: f64, t: f64) -> f64 {
    let width = math::powf(r, alpha);
    if t <= r {
        1.0
    } else if t >= r + width {
        0.0
    } else {
        (r + width - t) / width
    }
}

/// `g_{r,x}^{(α)}(z) = φ_r^{(α)}(dist(z, x))`.
pub fn bump_g(r: f64, alpha: f64, x: &[f64], z: &[f64]) -> f64 {
    let dist2: f64 = x
        .iter()
        .zip(z)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    bump_eval(r, alpha, math::sqrt(dist2))
}

/// One lag of a correlation probe.
#[derive(Debug, Clone, Copy)]
pub struct CorrelationPoint {
    pub lag: usize,
    pub estimate: f64,
    pub std_error: f64,
}

/// Exact chain correlation `μ(1_[g] · 1_[f] ∘ σⁿ) − μ([g])μ([f])` for
/// cylinder indicators on a Markov measure. For lags shorter than the `g`
/// word the overlap is resolved by direct enumeration; beyond it the Markov
/// property gives a matrix-power expression.
pub fn chain_correlation_exact(
    measure: &MarkovMeasure,
    g_word: &Word,
    f_word: &Word,
    lag: usize,
) -> Result<f64, ReturnsError> {
    if g_word.is_empty() || f_word.is_empty() {
        return Err(ReturnsError::MalformedTarget);
    }
    let space = measure.space();
    let mg = g_word.len();
    let mf = f_word.len();
    let product = measure.mass(g_word) * measure.mass(f_word);
    if lag < mg {
        // Joint event on a window of length max(mg, lag + mf).
        let len = mg.max(lag + mf);
        let mut joint = 0.0;
        for w in space.admissible_words(len)? {
            if w.0[..mg] == g_word.0[..] && w.0[lag..lag + mf] == f_word.0[..] {
                joint += measure.mass(&w);
            }
        }
        return Ok(joint - product);
    }
    // No overlap: f starts lag+1−mg steps after the last symbol of g, so
    // joint = mass(g) · (P^{lag+1−mg})[last(g)][first(f)] · mass(f)/π[first(f)].
    let n = space.alphabet_size();
    let steps = lag + 1 - mg;
    let mut v = vec![0.0; n];
    v[*g_word.last().unwrap() as usize] = 1.0;
    for _ in 0..steps {
        let mut next = vec![0.0; n];
        for (a, &mass) in v.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for b in 0..n {
                let p = measure.transition(a as u32, b as u32);
                if p > 0.0 {
                    next[b] += mass * p;
                }
            }
        }
        v = next;
    }
    let f1 = f_word[0] as usize;
    let pi_f1 = measure.stationary()[f1];
    let joint = measure.mass(g_word) * v[f1] * measure.mass(f_word) / pi_f1;
    Ok(joint - product)
}

/// Monte-Carlo estimates of `|μ(f∘σⁿ · g) − μ(g)μ(f)|` for cylinder
/// indicators `f`, `g` under a simulable stationary measure; explicitly an
/// estimate with standard errors, never a certificate.
pub fn correlation_probe<M: CylinderMeasure>(
    measure: &M,
    g_word: &Word,
    f_word: &Word,
    lags: &[usize],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<CorrelationPoint>, ReturnsError> {
    if g_word.is_empty() || f_word.is_empty() {
        return Err(ReturnsError::MalformedTarget);
    }
    if n_samples == 0 || lags.is_empty() {
        return Err(ReturnsError::BadParameter("need samples and lags"));
    }
    let mu_g = measure.mass(g_word);
    let mu_f = measure.mass(f_word);
    let max_lag = *lags.iter().max().unwrap();
    let len = g_word.len().max(max_lag + f_word.len());
    let mut rows = Vec::with_capacity(lags.len());
    let mut sums = vec![0.0f64; lags.len()];
    let mut sums2 = vec![0.0f64; lags.len()];
    for i in 0..n_samples {
        let mut rng = crate::rng::stream(seed, i as u64);
        let path = sample_path(measure, len, &mut rng)?;
        let g_val = if path[..g_word.len()] == g_word.0[..] {
            1.0
        } else {
            0.0
        };
        for (j, &lag) in lags.iter().enumerate() {
            let f_val = if path[lag..lag + f_word.len()] == f_word.0[..] {
                1.0
            } else {
                0.0
            };
            let prod = g_val * f_val;
            sums[j] += prod;
            sums2[j] += prod * prod;
        }
    }
    for (j, &lag) in lags.iter().enumerate() {
        let mean = sums[j] / n_samples as f64;
        let var = (sums2[j] / n_samples as f64 - mean * mean).max(0.0);
        rows.push(CorrelationPoint {
            lag,
            estimate: mean - mu_g * mu_f,
            std_error: math::sqrt(var / n_samples as f64),
        });
    }
    Ok(rows)
}

/// Monte-Carlo correlation estimates for an interval map: `g` is the
/// Lipschitz ramp around `g_center` with plateau radius `g_radius` and ramp
/// exponent `alpha`, `f` the indicator of the ball at `f_center`. Initial
/// points come from the projected measure; forward orbits are plain float
/// iteration, so lags should stay well below the mantissa budget of the
/// expansion rate (≈ 40 steps for binary expanders).
#[allow(clippy::too_many_arguments)]
pub fn correlation_probe_map<M: CylinderMeasure>(
    ifs: &ConformalIFS,
    measure: &M,
    map: &PiecewiseMap1d,
    g_center: f64,
    g_radius: f64,
    alpha: f64,
    f_center: f64,
    f_radius: f64,
    lags: &[usize],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<CorrelationPoint>, ReturnsError> {
    if n_samples == 0 || lags.is_empty() {
        return Err(ReturnsError::BadParameter("need samples and lags"));
    }
    if lags[0] == 0 || lags.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ReturnsError::BadParameter(
            "lags must be strictly increasing and start at 1 or later",
        ));
    }
    let max_lag = *lags.iter().max().unwrap();
    // μ(g) and μ(f) estimated on the same sample so the subtraction is
    // internally consistent.
    let mut sums = vec![0.0f64; lags.len()];
    let mut sums2 = vec![0.0f64; lags.len()];
    let mut g_mean = 0.0f64;
    let mut f_mean = 0.0f64;
    for i in 0..n_samples {
        let mut rng = crate::rng::stream(seed, i as u64);
        let x0 = ifs.sample_point(measure, &mut rng, 1e-13)[0];
        let g_val = bump_eval(g_radius, alpha, (x0 - g_center).abs());
        g_mean += g_val;
        let mut x = x0;
        let mut lag_iter = lags.iter().enumerate().peekable();
        for step in 1..=max_lag {
            x = match map.eval(x) {
                Some(y) => y,
                None => break,
            };
            while let Some(&(j, &lag)) = lag_iter.peek() {
                if lag != step {
                    break;
                }
                let f_val = if (x - f_center).abs() < f_radius {
                    1.0
                } else {
                    0.0
                };
                if j == 0 {
                    f_mean += f_val;
                }
                let prod = g_val * f_val;
                sums[j] += prod;
                sums2[j] += prod * prod;
                lag_iter.next();
            }
        }
    }
    g_mean /= n_samples as f64;
    f_mean /= n_samples as f64;
    Ok(lags
        .iter()
        .enumerate()
        .map(|(j, &lag)| {
            let mean = sums[j] / n_samples as f64;
            let var = (sums2[j] / n_samples as f64 - mean * mean).max(0.0);
            CorrelationPoint {
                lag,
                estimate: mean - g_mean * f_mean,
                std_error: math::sqrt(var / n_samples as f64),
            }
        })
        .collect())
}

/// Log-linear fit `|corr_n| ≈ C·γⁿ` over the probe points with nonzero
/// estimates; an empirical summary, not a certificate.
pub fn fit_decay(points: &[CorrelationPoint]) -> Option<(f64, f64)> {
    let data: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.estimate.abs() > 0.0)
        .map(|p| (p.lag as f64, math::ln(p.estimate.abs())))
        .collect();
    if data.len() < 2 {
        return None;
    }
    let n = data.len() as f64;
    let sx: f64 = data.iter().map(|d| d.0).sum();
    let sy: f64 = data.iter().map(|d| d.1).sum();
    let sxx: f64 = data.iter().map(|d| d.0 * d.0).sum();
    let sxy: f64 = data.iter().map(|d| d.0 * d.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    Some((math::exp(intercept), math::exp(slope)))
}

/// Pointwise-dimension estimates along a radius grid.
#[derive(Debug, Clone)]
pub struct DimensionEstimate {
    /// Min over scales of the pessimistic lower end of `ln μ(B)/ln r`.
    pub lower: f64,
    /// Max over scales of the pessimistic upper end.
    pub upper: f64,
    /// Least-squares slope of `ln μ(B)` against `ln r` (midpoints), for
    /// reporting.
    pub slope: f64,
    pub unresolved: usize,
    /// `(r, d_low, d_high)` rows that resolved.
    pub rows: Vec<(f64, f64, f64)>,
}

/// Pointwise dimension of the projected measure at `x` along `r_grid`.
pub fn pointwise_dimension<M: CylinderMeasure>(
    ifs: &ConformalIFS,
    measure: &M,
    x: &[f64],
    r_grid: &[f64],
    params: WalkParams,
) -> DimensionEstimate {
    let mut rows = Vec::new();
    let mut unresolved = 0usize;
    let mut fit: Vec<(f64, f64)> = Vec::new();
    for &r in r_grid {
        let ball = ball_measure_bounds(ifs, measure, x, r, params);
        if !ball.resolved || ball.lower <= 0.0 {
            unresolved += 1;
            continue;
        }
        let ln_r = math::ln(r);
        // ln is monotone and ln r < 0, so the interval ends swap.
        let d_low = math::ln(ball.upper) / ln_r;
        let d_high = math::ln(ball.lower) / ln_r;
        rows.push((r, d_low, d_high));
        fit.push((ln_r, math::ln(ball.midpoint())));
    }
    let (mut lower, mut upper) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(_, lo, hi) in &rows {
        lower = lower.min(lo);
        upper = upper.max(hi);
    }
    let slope = if fit.len() >= 2 {
        let n = fit.len() as f64;
        let sx: f64 = fit.iter().map(|d| d.0).sum();
        let sy: f64 = fit.iter().map(|d| d.1).sum();
        let sxx: f64 = fit.iter().map(|d| d.0 * d.0).sum();
        let sxy: f64 = fit.iter().map(|d| d.0 * d.1).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    } else {
        f64::NAN
    };
    DimensionEstimate {
        lower,
        upper,
        slope,
        unresolved,
        rows,
    }
}

/// Feasibility report for the lag recipe `n_r = μ(B_r)^{−θ}`: the proof
/// strategy needs some `α ∈ (0, 1]` with `α < −χ ln γ` and
/// `2θ·d_upper < α·d_lower/2`, where `χ` is the no-small-returns rate, `γ`
/// the correlation-decay rate, and `d_lower ≤ d_upper` the pointwise
/// dimension ends. All inputs here are empirical proxies, so the verdict is
/// a diagnostic, never a certificate.
#[derive(Debug, Clone, Copy)]
pub struct LagRecipeDiagnostic {
    pub theta: f64,
    pub chi: f64,
    pub gamma: f64,
    pub d_lower: f64,
    pub d_upper: f64,
    /// Largest usable `α`: `min(1, −χ ln γ)`.
    pub alpha_max: f64,
    /// The `θ` ceiling `α_max·d_lower/(4·d_upper)`.
    pub theta_bound: f64,
    pub feasible: bool,
}

pub fn lag_recipe_diagnostic(
    theta: f64,
    chi: f64,
    gamma: f64,
    d_lower: f64,
    d_upper: f64,
) -> LagRecipeDiagnostic {
    let alpha_max = if gamma > 0.0 && gamma < 1.0 && chi > 0.0 {
        (-chi * math::ln(gamma)).min(1.0)
    } else {
        0.0
    };
    let theta_bound = if d_upper > 0.0 {
        alpha_max * d_lower / (4.0 * d_upper)
    } else {
        0.0
    };
    LagRecipeDiagnostic {
        theta,
        chi,
        gamma,
        d_lower,
        d_upper,
        alpha_max,
        theta_bound,
        feasible: alpha_max > 0.0 && theta > 0.0 && theta < theta_bound,
    }
}

/// One row of the no-small-returns diagnostic.
#[derive(Debug, Clone, Copy)]
pub struct NsrRow {
    pub r: f64,
    /// First time the forward image of the ball meets the ball again; a
    /// lower bound when not exact.
    pub tau: u64,
    pub exact: bool,
    /// `τ / (−ln r)`.
    pub stat: f64,
}

/// First-return certification for an interval map: iterate the exact
/// forward image of `B(x, r)` until it meets the ball (even intersection is
/// a return witness, so `τ` is exact) or the horizon runs out (then `τ ≥
/// horizon` is reported as a lower bound).
pub fn no_small_returns_map(
    map: &PiecewiseMap1d,
    x: f64,
    r_grid: &[f64],
    horizon: u64,
) -> Vec<NsrRow> {
    r_grid
        .iter()
        .map(|&r| {
            let ball = (x - r, x + r);
            let mut parts = vec![ball];
            let mut tau = horizon;
            let mut exact = false;
            for j in 1..=horizon {
                parts = map.image_intervals(&parts);
                let hits = parts.iter().any(|&(lo, hi)| lo < ball.1 && ball.0 < hi);
                if hits {
                    tau = j;
                    exact = true;
                    break;
                }
            }
            NsrRow {
                r,
                tau,
                exact,
                stat: tau as f64 / -math::ln(r),
            }
        })
        .collect()
}

/// No-small-returns statistic for a cylinder-aligned target: the word's
/// self-overlap bounds the cylinder's first return from below (exactly on a
/// full shift), and the cylinder diameter plays the radius.
pub fn no_small_returns_cylinder(
    ifs: &ConformalIFS,
    word: &Word,
) -> Result<NsrRow, ReturnsError> {
    let overlap = ifs.space().word_self_overlap(word)?;
    let geo = ifs
        .cylinder_geometry(word)
        .map_err(|_| ReturnsError::MalformedTarget)?;
    let r = geo.diameter * ifs.diam_seed();
    Ok(NsrRow {
        r,
        tau: overlap as u64,
        exact: overlap < word.len() || ifs.space().is_full_shift(),
        stat: overlap as f64 / -math::ln(r),
    })
}
