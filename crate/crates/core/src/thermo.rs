//! Potentials, Birkhoff sums, topological pressure, and Gibbs/equilibrium
//! states on finite subshifts.
//!
//! A depth-`k` potential depends on the first `k` symbols of a sequence.
//! Pressure and Gibbs states are computed exactly (up to the solver
//! tolerance) by recoding the potential to a transfer matrix on the
//! `(k-1)`-block edge shift and taking Perron eigendata; cylinder masses are
//! stationary path probabilities of the recoded chain.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::symbolic::{CylinderMeasure, SymbolicSpace, SymbolicError, Word};

/// Relative tolerance of the Perron power iteration.
pub const POWER_TOL: f64 = 1e-14;
/// Iteration cap of the Perron power iteration.
pub const POWER_ITER_CAP: usize = 100_000;
/// Default word length up to which Gibbs constants are certified.
pub const DEFAULT_CERT_LEN: usize = 12;
/// Ceiling on recoded transfer-matrix entries.
const MAX_MATRIX_ENTRIES: usize = 16_000_000;
/// Ceiling on words scanned during certification passes.
const CERT_WORD_BUDGET: u128 = 300_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ThermoError {
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),

    #[error("potential table of {entries} entries exceeds the budget")]
    PotentialTooLarge { entries: u128 },

    #[error("recoded transfer matrix with {states} states is too large")]
    MatrixTooLarge { states: usize },

    #[error("recoded transfer matrix is not irreducible")]
    Reducible,

    #[error("Perron iteration did not converge within the cap")]
    NoConvergence,

    #[error("word of length {have} too short: need at least {required} symbols")]
    InsufficientPrefix { have: usize, required: usize },

    #[error("row {row} of the stochastic matrix sums to {sum}, not 1")]
    NonStochasticRow { row: usize, sum: f64 },

    #[error("operation supports potentials of depth <= 2, got {depth}")]
    DepthTooLarge { depth: usize },

    #[error("invalid parameter: {0}")]
    BadParameter(&'static str),
}

/// Optional Hölder regularity record attached to a potential.
///
/// Purely documentary: the exponent and variation bound describe the function
/// the depth-`k` table approximates; no error bound is derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderData {
    pub exponent: f64,
    pub variation: f64,
}

/// A potential of finite depth: its value depends on the first `depth`
/// symbols only, stored as a dense table over all symbol windows.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    space: SymbolicSpace,
    depth: usize,
    /// `values[rank(window)]`, rank = big-endian positional index.
    values: Vec<f64>,
    pub holder: Option<HolderData>,
}

impl Potential {
    /// Tabulate `f` over all length-`depth` windows.
    pub fn from_fn(
        space: &SymbolicSpace,
        depth: usize,
        f: impl Fn(&[u32]) -> f64,
    ) -> Result<Self, ThermoError> {
        if depth == 0 {
            return Err(ThermoError::BadParameter("potential depth must be >= 1"));
        }
        let n = space.alphabet_size();
        let entries = (n as u128).saturating_pow(depth as u32);
        if entries > 4_000_000 {
            return Err(ThermoError::PotentialTooLarge { entries });
        }
        let mut values = vec![0.0; entries as usize];
        let mut window = vec![0u32; depth];
        for (rank, v) in values.iter_mut().enumerate() {
            let mut r = rank;
            for i in (0..depth).rev() {
                window[i] = (r % n) as u32;
                r /= n;
            }
            *v = f(&window);
        }
        Ok(Potential {
            space: space.clone(),
            depth,
            values,
            holder: None,
        })
    }

    /// Depth-1 potential from per-symbol values.
    pub fn depth1(space: &SymbolicSpace, values: &[f64]) -> Result<Self, ThermoError> {
        if values.len() != space.alphabet_size() {
            return Err(ThermoError::BadParameter(
                "need one value per alphabet symbol",
            ));
        }
        Ok(Potential {
            space: space.clone(),
            depth: 1,
            values: values.to_vec(),
            holder: None,
        })
    }

    /// The constant potential `f ≡ c`.
    pub fn constant(space: &SymbolicSpace, c: f64) -> Self {
        Potential::depth1(space, &vec![c; space.alphabet_size()]).unwrap()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn space(&self) -> &SymbolicSpace {
        &self.space
    }

    fn rank(&self, window: &[u32]) -> usize {
        let n = self.space.alphabet_size();
        window.iter().fold(0usize, |acc, &s| acc * n + s as usize)
    }

    /// Value on a window of exactly `depth` symbols.
    pub fn value(&self, window: &[u32]) -> f64 {
        debug_assert_eq!(window.len(), self.depth);
        self.values[self.rank(window)]
    }

    /// `sup f` over the cylinder of `word`: exact for `|word| ≥ depth`, the
    /// maximum over admissible completions otherwise.
    pub fn sup_on_cylinder(&self, word: &[u32]) -> f64 {
        if word.len() >= self.depth {
            return self.value(&word[..self.depth]);
        }
        let mut buf = word.to_vec();
        self.sup_completions(&mut buf)
    }

    fn sup_completions(&self, buf: &mut Vec<u32>) -> f64 {
        if buf.len() == self.depth {
            return self.value(buf);
        }
        let mut best = f64::NEG_INFINITY;
        for s in 0..self.space.alphabet_size() as u32 {
            let ok = match buf.last() {
                Some(&last) => self.space.admissible(last, s),
                None => true,
            };
            if ok {
                buf.push(s);
                best = best.max(self.sup_completions(buf));
                buf.pop();
            }
        }
        best
    }

    /// The potential `t·f` (same depth, scaled table).
    pub fn scaled(&self, t: f64) -> Potential {
        Potential {
            space: self.space.clone(),
            depth: self.depth,
            values: self.values.iter().map(|&v| t * v).collect(),
            holder: self.holder,
        }
    }

    /// Summability record `Σ_e exp(sup f|[e])`; always finite here since the
    /// alphabet is finite, kept because gallery truncations report it.
    pub fn summability_sum(&self) -> f64 {
        (0..self.space.alphabet_size() as u32)
            .map(|e| math::exp(self.sup_on_cylinder(&[e])))
            .sum()
    }
}

/// Birkhoff sum `Σ_{j=0}^{n-1} f(σ^j ω)` evaluated on the prefix `word`.
///
/// Requires `|word| ≥ n + depth(f) − 1` so every shifted window is
/// determined.
pub fn birkhoff_sum(f: &Potential, word: &[u32], n: usize) -> Result<f64, ThermoError> {
    let required = n + f.depth() - 1;
    if word.len() < required {
        return Err(ThermoError::InsufficientPrefix {
            have: word.len(),
            required,
        });
    }
    Ok((0..n).map(|j| f.value(&word[j..j + f.depth()])).sum())
}

/// Birkhoff sum of cylinder suprema over the whole word: exact windows while
/// they fit, suprema over admissible completions for the trailing ones. This
/// is the exponent the Gibbs property compares masses against.
pub fn sup_birkhoff_sum(f: &Potential, word: &[u32]) -> f64 {
    (0..word.len()).map(|j| f.sup_on_cylinder(&word[j..])).sum()
}

/// Perron eigendata of a nonnegative square matrix.
#[derive(Debug, Clone)]
pub struct PerronData {
    pub lambda: f64,
    pub vector: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Power iteration with a diagonal shift (so periodic supports converge),
/// deterministic all-ones start, L1 normalisation.
pub fn perron_vector(matrix: &[f64], n: usize, transpose: bool) -> PerronData {
    assert_eq!(matrix.len(), n * n);
    let at = |i: usize, j: usize| {
        if transpose {
            matrix[j * n + i]
        } else {
            matrix[i * n + j]
        }
    };
    let shift = matrix.iter().fold(0.0f64, |a, &x| a.max(x)).max(1e-300);
    let mut v = vec![1.0 / n as f64; n];
    let mut lambda_prev = f64::NAN;
    for it in 1..=POWER_ITER_CAP {
        let mut w = vec![0.0; n];
        for i in 0..n {
            let mut acc = shift * v[i];
            for j in 0..n {
                acc += at(i, j) * v[j];
            }
            w[i] = acc;
        }
        let total: f64 = w.iter().sum();
        let lambda = total - shift; // Σw/Σv with Σv = 1, minus the shift
        let mut delta = 0.0f64;
        for x in w.iter_mut() {
            *x /= total;
        }
        for i in 0..n {
            delta = delta.max((w[i] - v[i]).abs());
        }
        v = w;
        let lam_ok = (lambda - lambda_prev).abs() <= POWER_TOL * lambda.abs().max(1e-300);
        if lam_ok && delta <= POWER_TOL {
            return PerronData {
                lambda,
                vector: v,
                converged: true,
                iterations: it,
            };
        }
        lambda_prev = lambda;
    }
    PerronData {
        lambda: lambda_prev,
        vector: v,
        converged: false,
        iterations: POWER_ITER_CAP,
    }
}

/// The recoded transfer matrix of a depth-`k` potential: states are the
/// admissible `(k-1)`-blocks (symbols when `k = 1`), and a transition weight
/// is `exp(f(window))` for the window ending at the new symbol.
struct TransferMatrix {
    states: Vec<Word>,
    state_len: usize,
    index: BTreeMap<Vec<u32>, usize>,
    matrix: Vec<f64>,
}

fn transfer_matrix(space: &SymbolicSpace, f: &Potential) -> Result<TransferMatrix, ThermoError> {
    let state_len = f.depth().max(2) - 1;
    let states = space.admissible_words(state_len)?;
    let s = states.len();
    if s.saturating_mul(s) > MAX_MATRIX_ENTRIES {
        return Err(ThermoError::MatrixTooLarge { states: s });
    }
    let mut index = BTreeMap::new();
    for (i, w) in states.iter().enumerate() {
        index.insert(w.0.clone(), i);
    }
    let mut matrix = vec![0.0; s * s];
    let mut window = Vec::with_capacity(f.depth());
    for (ui, u) in states.iter().enumerate() {
        for e in space.successors(*u.last().unwrap()) {
            let mut v_key = u.0[1..].to_vec();
            v_key.push(e);
            let vi = match index.get(&v_key) {
                Some(&vi) => vi,
                None => continue,
            };
            window.clear();
            if f.depth() == 1 {
                window.push(e);
            } else {
                window.extend_from_slice(&u.0);
                window.push(e);
            }
            matrix[ui * s + vi] = math::exp(f.value(&window));
        }
    }
    Ok(TransferMatrix {
        states,
        state_len,
        index,
        matrix,
    })
}

/// Strong connectivity of the support digraph (forward and backward
/// reachability from state 0 must both cover everything).
fn strongly_connected(matrix: &[f64], n: usize) -> bool {
    let reach = |transpose: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let w = if transpose {
                    matrix[j * n + i]
                } else {
                    matrix[i * n + j]
                };
                if w > 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.iter().all(|&x| x)
    };
    reach(false) && reach(true)
}

/// Topological pressure together with a flag recording whether the recoded
/// matrix was irreducible (pressure is still the log spectral radius when it
/// is not, but uniqueness of the Gibbs state is then lost).
#[derive(Debug, Clone)]
pub struct PressureReport {
    pub value: f64,
    pub recoded_irreducible: bool,
}

/// Topological pressure `P(f)`: the exponential growth rate of cylinder
/// partition sums, computed as the log spectral radius of the recoded
/// transfer matrix.
pub fn pressure(space: &SymbolicSpace, f: &Potential) -> Result<PressureReport, ThermoError> {
    // Depth-1 on a full shift: the matrix has identical rows, the spectral
    // radius is the plain weight sum. Handles very large alphabets exactly.
    if f.depth() == 1 && space.is_full_shift() {
        let z: f64 = (0..space.alphabet_size() as u32)
            .map(|e| math::exp(f.value(&[e])))
            .sum();
        return Ok(PressureReport {
            value: math::ln(z),
            recoded_irreducible: true,
        });
    }
    let tm = transfer_matrix(space, f)?;
    let n = tm.states.len();
    let pd = perron_vector(&tm.matrix, n, false);
    if !pd.converged {
        return Err(ThermoError::NoConvergence);
    }
    Ok(PressureReport {
        value: math::ln(pd.lambda),
        recoded_irreducible: strongly_connected(&tm.matrix, n),
    })
}

/// Eigendata backing a Gibbs state.
#[derive(Debug, Clone)]
pub struct EigenData {
    pub lambda: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

#[derive(Debug, Clone)]
enum GibbsKind {
    /// Product measure of normalised weights (depth-1, full shift).
    Product { probs: Vec<f64> },
    /// Stationary chain on recoded block states.
    Chain {
        stationary: Vec<f64>,
        transition: Vec<f64>,
    },
}

/// The Gibbs/equilibrium state of a potential on a finite subshift.
///
/// Cylinder masses are stationary path probabilities in the recoded chain;
/// the Gibbs inequality constant is certified by scanning words up to a
/// recorded length, and the eigenvector spread (which realises the constant
/// asymptotically) is available from [`GibbsState::eigen_ratio`].
#[derive(Debug, Clone)]
pub struct GibbsState {
    space: SymbolicSpace,
    depth: usize,
    state_len: usize,
    states: Vec<Word>,
    index: BTreeMap<Vec<u32>, usize>,
    kind: GibbsKind,
    pub pressure: f64,
    pub eigen: EigenData,
    pub gibbs_constant: f64,
    pub cert_len: usize,
}

impl GibbsState {
    pub fn states(&self) -> &[Word] {
        &self.states
    }

    /// Depth of the defining potential.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn state_len(&self) -> usize {
        self.state_len
    }

    /// Spread of the Perron eigenvectors, the asymptotic driver of the Gibbs
    /// constant.
    pub fn eigen_ratio(&self) -> f64 {
        let spread = |v: &[f64]| {
            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            for &x in v {
                lo = lo.min(x);
                hi = hi.max(x);
            }
            hi / lo
        };
        spread(&self.eigen.left) * spread(&self.eigen.right)
    }
}

impl CylinderMeasure for GibbsState {
    fn space(&self) -> &SymbolicSpace {
        &self.space
    }

    fn markov_order(&self) -> Option<usize> {
        match &self.kind {
            GibbsKind::Product { .. } => Some(0),
            GibbsKind::Chain { .. } => Some(self.state_len),
        }
    }

    fn mass(&self, word: &[u32]) -> f64 {
        if word.is_empty() {
            return 1.0;
        }
        if !self.space.is_admissible(word) {
            return 0.0;
        }
        match &self.kind {
            GibbsKind::Product { probs } => word
                .iter()
                .map(|&s| probs[s as usize])
                .product(),
            GibbsKind::Chain {
                stationary,
                transition,
            } => {
                let len = self.state_len;
                let s = self.states.len();
                if word.len() < len {
                    // Sum the stationary weights of the states extending it.
                    return self
                        .states
                        .iter()
                        .enumerate()
                        .filter(|(_, st)| st.0.starts_with(word))
                        .map(|(i, _)| stationary[i])
                        .sum();
                }
                let mut u = *self.index.get(&word[..len]).unwrap();
                let mut acc = stationary[u];
                for i in 1..=word.len() - len {
                    let v = *self.index.get(&word[i..i + len]).unwrap();
                    acc *= transition[u * s + v];
                    u = v;
                }
                acc
            }
        }
    }
}

/// The unique shift-invariant Gibbs/equilibrium state of `f`, certified up to
/// [`DEFAULT_CERT_LEN`].
pub fn gibbs_measure(space: &SymbolicSpace, f: &Potential) -> Result<GibbsState, ThermoError> {
    gibbs_measure_certified(space, f, DEFAULT_CERT_LEN)
}

/// As [`gibbs_measure`], certifying the Gibbs constant over words of length
/// `≤ cert_len` (clipped by an internal word budget).
pub fn gibbs_measure_certified(
    space: &SymbolicSpace,
    f: &Potential,
    cert_len: usize,
) -> Result<GibbsState, ThermoError> {
    let mut state = if f.depth() == 1 && space.is_full_shift() {
        // Product fast path: masses are products of normalised weights.
        let weights: Vec<f64> = (0..space.alphabet_size() as u32)
            .map(|e| math::exp(f.value(&[e])))
            .collect();
        let z: f64 = weights.iter().sum();
        let probs: Vec<f64> = weights.iter().map(|w| w / z).collect();
        let states: Vec<Word> = (0..space.alphabet_size() as u32)
            .map(|e| Word(vec![e]))
            .collect();
        let mut index = BTreeMap::new();
        for (i, w) in states.iter().enumerate() {
            index.insert(w.0.clone(), i);
        }
        GibbsState {
            space: space.clone(),
            depth: 1,
            state_len: 1,
            eigen: EigenData {
                lambda: z,
                left: probs.clone(),
                right: vec![1.0; probs.len()],
            },
            index,
            states,
            kind: GibbsKind::Product { probs },
            pressure: math::ln(z),
            gibbs_constant: 1.0,
            cert_len: 0,
        }
    } else {
        let tm = transfer_matrix(space, f)?;
        let s = tm.states.len();
        if !strongly_connected(&tm.matrix, s) {
            return Err(ThermoError::Reducible);
        }
        let right = perron_vector(&tm.matrix, s, false);
        let left = perron_vector(&tm.matrix, s, true);
        if !right.converged || !left.converged {
            return Err(ThermoError::NoConvergence);
        }
        let lambda = right.lambda;
        // Stationary state weights p_u ∝ left_u · right_u; transitions
        // Q(u→v) = M_uv right_v / (λ right_u).
        let mut stationary: Vec<f64> = (0..s)
            .map(|i| left.vector[i] * right.vector[i])
            .collect();
        let z: f64 = stationary.iter().sum();
        for p in stationary.iter_mut() {
            *p /= z;
        }
        let mut transition = vec![0.0; s * s];
        for u in 0..s {
            let mut row_sum = 0.0;
            for v in 0..s {
                transition[u * s + v] =
                    tm.matrix[u * s + v] * right.vector[v] / (lambda * right.vector[u]);
                row_sum += transition[u * s + v];
            }
            // Remove the residual solver error so additivity is exact.
            for v in 0..s {
                transition[u * s + v] /= row_sum;
            }
        }
        GibbsState {
            space: space.clone(),
            depth: f.depth(),
            state_len: tm.state_len,
            states: tm.states,
            index: tm.index,
            kind: GibbsKind::Chain {
                stationary,
                transition,
            },
            pressure: math::ln(lambda),
            eigen: EigenData {
                lambda,
                left: left.vector,
                right: right.vector,
            },
            gibbs_constant: 1.0,
            cert_len: 0,
        }
    };
    state.gibbs_constant = gibbs_deviation(&state, f, cert_len);
    state.cert_len = cert_len;
    Ok(state)
}

/// Smallest constant certified over all admissible words of length
/// `≤ n_max`: the worst of `ratio` and `1/ratio` where
/// `ratio = mass(ω) / exp(S_sup f(ω) − P(f)|ω|)`.
pub fn gibbs_deviation(state: &GibbsState, f: &Potential, n_max: usize) -> f64 {
    let space = &state.space;
    let mut worst = 1.0f64;
    for n in 1..=n_max {
        let words = match space.admissible_words_capped(n, CERT_WORD_BUDGET) {
            Ok(w) => w,
            Err(_) => break,
        };
        for w in &words {
            let mass = state.mass(w);
            if mass <= 0.0 {
                continue;
            }
            let expo = sup_birkhoff_sum(f, w) - state.pressure * n as f64;
            let ratio = mass / math::exp(expo);
            worst = worst.max(ratio).max(1.0 / ratio);
        }
    }
    worst
}

/// A stationary Markov measure compatible with the incidence matrix.
///
/// Exact-oracle measure used throughout the return-time and survival
/// machinery; the special case of a Gibbs state for a depth-2 potential.
#[derive(Debug, Clone)]
pub struct MarkovMeasure {
    space: SymbolicSpace,
    /// Row-stochastic transition matrix, row-major.
    transition: Vec<f64>,
    stationary: Vec<f64>,
}

impl MarkovMeasure {
    /// Validates row sums to `1e-12`, support within the incidence matrix,
    /// and computes the stationary vector (residual below `1e-10`).
    pub fn new(space: &SymbolicSpace, rows: &[Vec<f64>]) -> Result<Self, ThermoError> {
        let n = space.alphabet_size();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(ThermoError::BadParameter(
                "transition matrix shape must match the alphabet",
            ));
        }
        let mut transition = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(ThermoError::NonStochasticRow { row: i, sum });
            }
            for (j, &p) in row.iter().enumerate() {
                if p < 0.0 {
                    return Err(ThermoError::BadParameter("negative transition probability"));
                }
                if p > 0.0 && !space.admissible(i as u32, j as u32) {
                    return Err(ThermoError::BadParameter(
                        "transition support violates the incidence matrix",
                    ));
                }
                transition.push(p);
            }
        }
        let pd = perron_vector(&transition, n, true);
        if !pd.converged {
            return Err(ThermoError::NoConvergence);
        }
        let total: f64 = pd.vector.iter().sum();
        let stationary: Vec<f64> = pd.vector.iter().map(|x| x / total).collect();
        let m = MarkovMeasure {
            space: space.clone(),
            transition,
            stationary,
        };
        if m.stationarity_residual() > 1e-10 {
            return Err(ThermoError::NoConvergence);
        }
        Ok(m)
    }

    pub fn transition(&self, a: u32, b: u32) -> f64 {
        self.transition[a as usize * self.space.alphabet_size() + b as usize]
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    /// `max_j |Σ_i π_i P_ij − π_j|`.
    pub fn stationarity_residual(&self) -> f64 {
        let n = self.space.alphabet_size();
        let mut worst = 0.0f64;
        for j in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                acc += self.stationary[i] * self.transition[i * n + j];
            }
            worst = worst.max((acc - self.stationary[j]).abs());
        }
        worst
    }

    /// Shannon entropy rate `−Σ_ij π_i P_ij ln P_ij`.
    pub fn entropy(&self) -> f64 {
        let n = self.space.alphabet_size();
        let mut h = 0.0;
        for i in 0..n {
            for j in 0..n {
                h -= self.stationary[i] * math::xlnx(self.transition[i * n + j]);
            }
        }
        h
    }

    /// Recode onto admissible `block_len`-words: states, stationary masses,
    /// and the induced row-stochastic transition (sliding-window overlap).
    pub fn block_chain(&self, block_len: usize) -> Result<BlockChain, ThermoError> {
        if block_len == 0 {
            return Err(ThermoError::BadParameter("block length must be >= 1"));
        }
        let states = self.space.admissible_words(block_len)?;
        let s = states.len();
        if s.saturating_mul(s) > MAX_MATRIX_ENTRIES {
            return Err(ThermoError::MatrixTooLarge { states: s });
        }
        let mut index = BTreeMap::new();
        for (i, w) in states.iter().enumerate() {
            index.insert(w.0.clone(), i);
        }
        let mut stationary = Vec::with_capacity(s);
        for w in &states {
            stationary.push(self.mass(w));
        }
        let mut transition = vec![0.0; s * s];
        for (ui, u) in states.iter().enumerate() {
            for e in self.space.successors(*u.last().unwrap()) {
                let p = self.transition(*u.last().unwrap(), e);
                if p == 0.0 {
                    continue;
                }
                let mut key = u.0[1..].to_vec();
                key.push(e);
                if let Some(&vi) = index.get(&key) {
                    transition[ui * s + vi] = p;
                }
            }
        }
        Ok(BlockChain {
            states,
            index,
            stationary,
            transition,
            block_len,
        })
    }
}

impl CylinderMeasure for MarkovMeasure {
    fn space(&self) -> &SymbolicSpace {
        &self.space
    }

    fn markov_order(&self) -> Option<usize> {
        Some(1)
    }

    fn mass(&self, word: &[u32]) -> f64 {
        if word.is_empty() {
            return 1.0;
        }
        if !self.space.is_admissible(word) {
            return 0.0;
        }
        let mut acc = self.stationary[word[0] as usize];
        for pair in word.windows(2) {
            acc *= self.transition(pair[0], pair[1]);
        }
        acc
    }
}

/// A Markov chain recoded onto sliding blocks of fixed length; the exact
/// substrate for survival curves and mixing distances with cylinder targets.
#[derive(Debug, Clone)]
pub struct BlockChain {
    pub states: Vec<Word>,
    pub index: BTreeMap<Vec<u32>, usize>,
    pub stationary: Vec<f64>,
    /// Row-major `S × S` row-stochastic matrix.
    pub transition: Vec<f64>,
    pub block_len: usize,
}

/// A product (memoryless) measure on a full shift.
#[derive(Debug, Clone)]
pub struct BernoulliMeasure {
    space: SymbolicSpace,
    probs: Vec<f64>,
}

impl BernoulliMeasure {
    pub fn new(probs: &[f64]) -> Result<Self, ThermoError> {
        let sum: f64 = probs.iter().sum();
        if probs.is_empty() || (sum - 1.0).abs() > 1e-12 || probs.iter().any(|&p| p < 0.0) {
            return Err(ThermoError::BadParameter(
                "probabilities must be nonnegative and sum to 1",
            ));
        }
        Ok(BernoulliMeasure {
            space: SymbolicSpace::full_shift(probs.len()),
            probs: probs.to_vec(),
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

impl CylinderMeasure for BernoulliMeasure {
    fn space(&self) -> &SymbolicSpace {
        &self.space
    }

    fn markov_order(&self) -> Option<usize> {
        Some(0)
    }

    fn mass(&self, word: &[u32]) -> f64 {
        word.iter().map(|&s| self.probs[s as usize]).product()
    }
}

/// Variational defect `h_m + ∫ f dm − P(f)` for a Markov measure and a
/// potential of depth `≤ 2`. Nonpositive always; zero exactly at the
/// equilibrium measure of `f`.
pub fn variational_gap(m: &MarkovMeasure, f: &Potential) -> Result<f64, ThermoError> {
    if f.depth() > 2 {
        return Err(ThermoError::DepthTooLarge { depth: f.depth() });
    }
    let space = m.space();
    let n = space.alphabet_size();
    let mut integral = 0.0;
    match f.depth() {
        1 => {
            for i in 0..n {
                integral += m.stationary()[i] * f.value(&[i as u32]);
            }
        }
        _ => {
            for i in 0..n {
                for j in 0..n {
                    let w = m.stationary()[i] * m.transition(i as u32, j as u32);
                    if w > 0.0 {
                        integral += w * f.value(&[i as u32, j as u32]);
                    }
                }
            }
        }
    }
    let p = pressure(space, f)?.value;
    Ok(m.entropy() + integral - p)
}

/// Largest shift-invariance defect `|Σ_e mass(eω) − mass(ω)|` over
/// admissible words of length `≤ max_len`.
pub fn shift_invariance_defect<M: CylinderMeasure>(measure: &M, max_len: usize) -> f64 {
    let space = measure.space();
    let mut worst = 0.0f64;
    for len in 0..=max_len {
        let words = match space.admissible_words_capped(len, CERT_WORD_BUDGET) {
            Ok(w) => w,
            Err(_) => break,
        };
        for w in &words {
            let mut sum = 0.0;
            let mut buf = Vec::with_capacity(len + 1);
            for e in 0..space.alphabet_size() as u32 {
                let ok = match w.first() {
                    Some(&first) => space.admissible(e, first),
                    None => true,
                };
                if ok {
                    buf.clear();
                    buf.push(e);
                    buf.extend_from_slice(w);
                    sum += measure.mass(&buf);
                }
            }
            worst = worst.max((sum - measure.mass(w)).abs());
        }
    }
    worst
}
