//! Sequential simulation of shift orbits and empirical entry/return laws.
//!
//! Any stationary cylinder measure with a finite Markov order can be
//! simulated symbol by symbol: the conditional law of the next symbol given
//! the generated prefix is a ratio of cylinder masses, and the order caps
//! how much trailing context the ratio needs. Ball targets are decided
//! through coded points of a trailing symbol window, at a resolution far
//! below the ball radius.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;

use crate::geometry::ConformalIFS;
use crate::rng;
use crate::symbolic::{CylinderMeasure, Word};

use super::{Ecdf, ReturnsError};

/// What an orbit is tested against, through the trailing symbol window.
#[derive(Debug, Clone)]
pub enum WindowTarget<'a> {
    /// Entry into the cylinder of a word.
    Word(&'a Word),
    /// Entry into a metric ball, decided at the resolution of `depth`
    /// symbols through the coding map (Monte-Carlo membership, not
    /// certified: points within one window-cylinder diameter of the
    /// boundary may be misclassified).
    CodedBall {
        ifs: &'a ConformalIFS,
        center: f64,
        radius: f64,
        depth: usize,
    },
}

impl WindowTarget<'_> {
    pub fn window_len(&self) -> usize {
        match self {
            WindowTarget::Word(w) => w.len(),
            WindowTarget::CodedBall { depth, .. } => *depth,
        }
    }

    /// Window depth that localises coded points to about a thousandth of
    /// the radius.
    pub fn ball_depth(ifs: &ConformalIFS, radius: f64) -> usize {
        let lambda = ifs.contraction().min(1.0 - 1e-9);
        let needed = crate::math::ln(radius * 1e-3) / crate::math::ln(lambda);
        (needed.max(1.0) as usize + 1).min(512)
    }

    fn matches(&self, window: &[u32]) -> bool {
        match self {
            WindowTarget::Word(w) => window == &w.0[..],
            WindowTarget::CodedBall {
                ifs,
                center,
                radius,
                ..
            } => {
                let mut cursor = ifs.root_cursor();
                for &s in window {
                    cursor = ifs.extend_cursor(&cursor, s);
                }
                let hull = ifs.cursor_hull(&cursor, window.last().copied());
                let x = 0.5 * (hull[0].0 + hull[0].1);
                (x - center).abs() < *radius
            }
        }
    }
}

/// Draw the next symbol given the trailing `context` (conditional cylinder
/// mass ratios; exact for stationary measures).
fn next_symbol<M: CylinderMeasure>(
    measure: &M,
    context: &[u32],
    rng: &mut ChaCha8Rng,
) -> Result<u32, ReturnsError> {
    let space = measure.space();
    let base = if context.is_empty() {
        1.0
    } else {
        measure.mass(context)
    };
    if base <= 0.0 {
        return Err(ReturnsError::ZeroMassTarget);
    }
    let mut weights: Vec<f64> = Vec::with_capacity(space.alphabet_size());
    let mut symbols: Vec<u32> = Vec::with_capacity(space.alphabet_size());
    let mut buf = context.to_vec();
    for e in 0..space.alphabet_size() as u32 {
        let ok = match context.last() {
            Some(&last) => space.admissible(last, e),
            None => true,
        };
        if !ok {
            continue;
        }
        buf.push(e);
        let m = measure.mass(&buf);
        buf.pop();
        if m > 0.0 {
            weights.push(m);
            symbols.push(e);
        }
    }
    if symbols.is_empty() {
        return Err(ReturnsError::ZeroMassTarget);
    }
    Ok(symbols[rng::categorical(rng, &weights)])
}

/// Sample a stationary path of `len` symbols.
pub fn sample_path<M: CylinderMeasure>(
    measure: &M,
    len: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<u32>, ReturnsError> {
    let order = measure
        .markov_order()
        .ok_or(ReturnsError::BadParameter(
            "measure does not expose a Markov order for simulation",
        ))?
        .max(1);
    let mut path: Vec<u32> = Vec::with_capacity(len);
    while path.len() < len {
        let start = path.len().saturating_sub(order);
        let sym = next_symbol(measure, &path[start..], rng)?;
        path.push(sym);
    }
    Ok(path)
}

/// Parameters of an empirical entry/return experiment.
#[derive(Debug, Clone, Copy)]
pub struct EmpiricalParams {
    pub n_samples: usize,
    /// Defaults to `⌈50/μ(U)⌉` when absent.
    pub horizon: Option<u64>,
    pub seed: u64,
}

struct OrbitState {
    /// Trailing symbols, newest last; holds `window + order` symbols.
    ring: Vec<u32>,
    window: usize,
    order: usize,
}

impl OrbitState {
    fn push(&mut self, s: u32) {
        self.ring.push(s);
        let keep = self.window.max(self.order);
        if self.ring.len() > keep {
            let excess = self.ring.len() - keep;
            self.ring.drain(..excess);
        }
    }

    fn window(&self) -> &[u32] {
        &self.ring[self.ring.len() - self.window..]
    }

    fn context(&self) -> &[u32] {
        let take = self.order.min(self.ring.len());
        &self.ring[self.ring.len() - take..]
    }
}

fn run_until_entry<M: CylinderMeasure>(
    measure: &M,
    target: &WindowTarget<'_>,
    state: &mut OrbitState,
    horizon: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Option<u64>, ReturnsError> {
    for n in 1..=horizon {
        let sym = next_symbol(measure, state.context(), rng)?;
        state.push(sym);
        if target.matches(state.window()) {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

fn stationary_window<M: CylinderMeasure>(
    measure: &M,
    len: usize,
    order: usize,
    rng: &mut ChaCha8Rng,
) -> Result<OrbitState, ReturnsError> {
    let mut state = OrbitState {
        ring: Vec::new(),
        window: len,
        order,
    };
    while state.ring.len() < len {
        let sym = next_symbol(measure, state.context(), rng)?;
        state.ring.push(sym);
    }
    Ok(state)
}

fn measure_order<M: CylinderMeasure>(measure: &M) -> Result<usize, ReturnsError> {
    measure
        .markov_order()
        .ok_or(ReturnsError::BadParameter(
            "measure does not expose a Markov order for simulation",
        ))
        .map(|o| o.max(1))
}

/// Empirical law of normalized first entry times: independent stationary
/// starts, each evolved until entry or the horizon; censored observations
/// are counted, entry times are normalized by `mu_u`.
pub fn empirical_entry_law<M: CylinderMeasure>(
    measure: &M,
    target: &WindowTarget<'_>,
    mu_u: f64,
    params: &EmpiricalParams,
) -> Result<Ecdf, ReturnsError> {
    if !(mu_u > 0.0) {
        return Err(ReturnsError::ZeroMassTarget);
    }
    if params.n_samples == 0 {
        return Err(ReturnsError::EmptySample);
    }
    let order = measure_order(measure)?;
    let horizon = params.horizon.unwrap_or((50.0 / mu_u) as u64 + 1);
    let mut times = Vec::with_capacity(params.n_samples);
    let mut censored = 0usize;
    for i in 0..params.n_samples {
        let mut rng = rng::stream(params.seed, i as u64);
        let mut state = stationary_window(measure, target.window_len(), order, &mut rng)?;
        match run_until_entry(measure, target, &mut state, horizon, &mut rng)? {
            Some(tau) => times.push(tau as f64 * mu_u),
            None => censored += 1,
        }
    }
    Ok(Ecdf::new(times, censored))
}

/// Empirical law of normalized first return times: starts drawn from the
/// conditional measure on the target (exactly for cylinder targets, by
/// rejection for ball targets), then evolved as for entry.
pub fn empirical_return_law<M: CylinderMeasure>(
    measure: &M,
    target: &WindowTarget<'_>,
    mu_u: f64,
    params: &EmpiricalParams,
) -> Result<Ecdf, ReturnsError> {
    if !(mu_u > 0.0) {
        return Err(ReturnsError::ZeroMassTarget);
    }
    if params.n_samples == 0 {
        return Err(ReturnsError::EmptySample);
    }
    let order = measure_order(measure)?;
    let horizon = params.horizon.unwrap_or((50.0 / mu_u) as u64 + 1);
    let rejection_cap: u64 = ((200.0 / mu_u) as u64).max(10_000);
    let mut times = Vec::with_capacity(params.n_samples);
    let mut censored = 0usize;
    for i in 0..params.n_samples {
        let mut rng = rng::stream(params.seed, i as u64);
        let mut state = match target {
            WindowTarget::Word(w) => OrbitState {
                ring: w.0.clone(),
                window: w.len(),
                order,
            },
            WindowTarget::CodedBall { .. } => {
                // Rejection from the stationary window law.
                let mut found = None;
                for _ in 0..rejection_cap {
                    let st = stationary_window(measure, target.window_len(), order, &mut rng)?;
                    if target.matches(st.window()) {
                        found = Some(st);
                        break;
                    }
                }
                found.ok_or(ReturnsError::RejectionFailure {
                    attempts: rejection_cap,
                })?
            }
        };
        match run_until_entry(measure, target, &mut state, horizon, &mut rng)? {
            Some(tau) => times.push(tau as f64 * mu_u),
            None => censored += 1,
        }
    }
    Ok(Ecdf::new(times, censored))
}
