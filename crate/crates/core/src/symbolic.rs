//! Word and cylinder combinatorics over a finite alphabet with an incidence
//! matrix.
//!
//! A space is the set of one-sided infinite sequences whose adjacent symbol
//! pairs are allowed by a boolean matrix `A`; finite admissible words name
//! cylinders. The module owns enumeration, the finite-irreducibility witness
//! search, self-overlap of words, and the generic cylinder-measure interface
//! that the thermodynamic and geometric layers implement.
//!
//! Everything is strictly finite-alphabet; countable alphabets enter the
//! crate only as truncations built by the gallery.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

/// Default ceiling on the number of words a single enumeration may produce.
pub const DEFAULT_WORD_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymbolicError {
    /// A row or column of the incidence matrix has no allowed transition.
    #[error("symbol {symbol} is dead ({side} of the incidence matrix is all false)")]
    DeadSymbol { symbol: u32, side: &'static str },

    /// The incidence matrix is not square or empty.
    #[error("incidence matrix must be a nonempty square boolean matrix")]
    MalformedIncidence,

    /// An enumeration would exceed its word budget.
    #[error("enumeration of {bound} words exceeds the budget of {budget}")]
    BudgetExceeded { bound: u128, budget: u128 },

    /// An operation required a nonempty word.
    #[error("operation requires a nonempty word")]
    EmptyWord,
}

/// A finite word over the alphabet; the empty word is allowed and names the
/// whole space as a cylinder.
///
/// Words are plain values with structural (and lexicographic) ordering, so
/// they can key maps and be compared across threads freely.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<u32>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_symbols(symbols: &[u32]) -> Self {
        Word(symbols.to_vec())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.0
    }

    /// Concatenation `self · other` (admissibility is the caller's concern).
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl core::ops::Deref for Word {
    type Target = [u32];
    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl core::fmt::Display for Word {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 && self.0.iter().any(|&x| x > 9) {
                write!(f, ".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Finite alphabet plus incidence matrix: the pair that determines which
/// juxtapositions of symbols are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicSpace {
    alphabet_size: usize,
    /// Row-major `alphabet_size × alphabet_size`; entry `(a, b)` allows `ab`.
    incidence: Vec<bool>,
    full_shift: bool,
}

impl SymbolicSpace {
    /// Space with every transition allowed.
    pub fn full_shift(alphabet_size: usize) -> Self {
        SymbolicSpace {
            alphabet_size,
            incidence: vec![true; alphabet_size * alphabet_size],
            full_shift: true,
        }
    }

    /// Space from an explicit incidence matrix.
    ///
    /// Every row and every column must have at least one allowed transition;
    /// a symbol that cannot be extended (or reached) would make cylinder
    /// masses ill-defined downstream.
    pub fn from_incidence(rows: &[Vec<bool>]) -> Result<Self, SymbolicError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(SymbolicError::MalformedIncidence);
        }
        let mut incidence = Vec::with_capacity(n * n);
        for r in rows {
            incidence.extend_from_slice(r);
        }
        for a in 0..n {
            if !(0..n).any(|b| incidence[a * n + b]) {
                return Err(SymbolicError::DeadSymbol {
                    symbol: a as u32,
                    side: "row",
                });
            }
            if !(0..n).any(|b| incidence[b * n + a]) {
                return Err(SymbolicError::DeadSymbol {
                    symbol: a as u32,
                    side: "column",
                });
            }
        }
        let full_shift = incidence.iter().all(|&x| x);
        Ok(SymbolicSpace {
            alphabet_size: n,
            incidence,
            full_shift,
        })
    }

    /// The golden-mean space on two symbols: `11` forbidden.
    pub fn golden_mean() -> Self {
        SymbolicSpace::from_incidence(&[vec![true, true], vec![true, false]]).unwrap()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn is_full_shift(&self) -> bool {
        self.full_shift
    }

    /// Is the juxtaposition `ab` allowed?
    #[inline]
    pub fn admissible(&self, a: u32, b: u32) -> bool {
        self.incidence[a as usize * self.alphabet_size + b as usize]
    }

    /// Is every adjacent pair of `word` allowed?
    pub fn is_admissible(&self, word: &[u32]) -> bool {
        word.iter().all(|&s| (s as usize) < self.alphabet_size)
            && word.windows(2).all(|w| self.admissible(w[0], w[1]))
    }

    /// Symbols that may follow `a`.
    pub fn successors(&self, a: u32) -> impl Iterator<Item = u32> + '_ {
        let n = self.alphabet_size;
        (0..n as u32).filter(move |&b| self.incidence[a as usize * n + b as usize])
    }

    /// Number of admissible words of length `n`, saturating at `u128::MAX`.
    ///
    /// Computed by iterating the count vector `v_{m+1}[b] = Σ_a v_m[a] A_ab`,
    /// so it equals the entry sum of the `(n-1)`-th matrix power.
    pub fn count_words(&self, n: usize) -> u128 {
        if n == 0 {
            return 1;
        }
        if self.full_shift {
            let base = self.alphabet_size as u128;
            let mut acc: u128 = 1;
            for _ in 0..n {
                acc = acc.saturating_mul(base);
            }
            return acc;
        }
        let size = self.alphabet_size;
        let mut v = vec![1u128; size];
        for _ in 1..n {
            let mut next = vec![0u128; size];
            for a in 0..size {
                if v[a] == 0 {
                    continue;
                }
                for b in 0..size {
                    if self.incidence[a * size + b] {
                        next[b] = next[b].saturating_add(v[a]);
                    }
                }
            }
            v = next;
        }
        v.iter().fold(0u128, |acc, &x| acc.saturating_add(x))
    }

    /// All admissible words of length `n` in lexicographic order, under the
    /// default budget of [`DEFAULT_WORD_BUDGET`].
    pub fn admissible_words(&self, n: usize) -> Result<Vec<Word>, SymbolicError> {
        self.admissible_words_capped(n, DEFAULT_WORD_BUDGET)
    }

    /// All admissible words of length `n` in lexicographic order.
    ///
    /// The predicted count is checked against `budget` before any allocation;
    /// exceeding it reports the bound that tripped the check.
    pub fn admissible_words_capped(
        &self,
        n: usize,
        budget: u128,
    ) -> Result<Vec<Word>, SymbolicError> {
        let bound = self.count_words(n);
        if bound > budget {
            return Err(SymbolicError::BudgetExceeded { bound, budget });
        }
        let mut out = Vec::with_capacity(bound as usize);
        let mut buf = Vec::with_capacity(n);
        self.enumerate_into(n, &mut buf, &mut out);
        Ok(out)
    }

    fn enumerate_into(&self, n: usize, buf: &mut Vec<u32>, out: &mut Vec<Word>) {
        if buf.len() == n {
            out.push(Word(buf.clone()));
            return;
        }
        for s in 0..self.alphabet_size as u32 {
            if let Some(&last) = buf.last() {
                if !self.admissible(last, s) {
                    continue;
                }
            }
            buf.push(s);
            self.enumerate_into(n, buf, out);
            buf.pop();
        }
    }

    /// A finite set `Λ` of words of length `≤ max_len` such that for every
    /// pair of symbols `a, b` some `ω ∈ Λ` makes `aωb` admissible; `None` if
    /// some pair cannot be connected within `max_len`.
    ///
    /// For each pair the shortest (then lexicographically first) connecting
    /// word is chosen, so the witness is deterministic. On a full shift the
    /// empty word alone suffices.
    pub fn finitely_irreducible_witness(&self, max_len: usize) -> Option<Vec<Word>> {
        let mut by_len: Vec<Vec<Word>> = Vec::new();
        for len in 0..=max_len {
            match self.admissible_words(len) {
                Ok(words) => by_len.push(words),
                Err(_) => break,
            }
        }
        let mut witness: BTreeSet<Word> = BTreeSet::new();
        for a in 0..self.alphabet_size as u32 {
            for b in 0..self.alphabet_size as u32 {
                let mut found = None;
                'search: for words in &by_len {
                    for w in words {
                        let joins = if w.is_empty() {
                            self.admissible(a, b)
                        } else {
                            self.admissible(a, w[0])
                                && self.admissible(*w.last().unwrap(), b)
                        };
                        if joins {
                            found = Some(w.clone());
                            break 'search;
                        }
                    }
                }
                {
                    let w = found?;
                    witness.insert(w);
                }
            }
        }
        Some(witness.into_iter().collect())
    }

    /// Smallest `k ≥ 1` such that the cylinder of `word` meets its own
    /// `k`-step shift preimage, capped at `|word|`.
    ///
    /// A proper overlap at `k < |word|` requires the length-`(|word|-k)`
    /// suffix-prefix match and admissibility of the glued word; when it
    /// exists the value is the exact first return time of the cylinder. When
    /// no proper overlap exists the cap `|word|` is returned — exact on a
    /// full shift (where `ωω` realises the return), a lower bound otherwise.
    pub fn word_self_overlap(&self, word: &Word) -> Result<usize, SymbolicError> {
        let n = word.len();
        if n == 0 {
            return Err(SymbolicError::EmptyWord);
        }
        for k in 1..n {
            let matches = (0..n - k).all(|i| word[i] == word[k + i]);
            if matches && self.admissible(word[k - 1], word[0]) {
                return Ok(k);
            }
        }
        Ok(n)
    }
}

/// Assignment of mass to every admissible finite word (a Borel probability
/// measure on the sequence space, seen through its cylinder values).
///
/// Implementations must satisfy `mass(ε) = 1`, additivity over one-symbol
/// extensions, and vanish on inadmissible words. The certification helpers
/// below measure how well a given implementation does on finite ranges.
pub trait CylinderMeasure {
    fn space(&self) -> &SymbolicSpace;

    /// Mass of the cylinder named by `word`.
    fn mass(&self, word: &[u32]) -> f64;

    /// Markov order when the measure has one: the conditional law of the
    /// next symbol depends on at most this many trailing symbols. Measures
    /// that expose an order can be simulated sequentially by exact mass
    /// ratios; `None` disables simulation.
    fn markov_order(&self) -> Option<usize> {
        None
    }
}

/// Largest additivity defect `|mass(ω) − Σ_e mass(ωe)|` over admissible
/// words of length `≤ max_len` (the sum runs over admissible extensions).
pub fn additivity_defect<M: CylinderMeasure>(measure: &M, max_len: usize) -> f64 {
    let space = measure.space();
    let mut worst = 0.0f64;
    for len in 0..=max_len {
        let words = match space.admissible_words(len) {
            Ok(w) => w,
            Err(_) => break,
        };
        for w in &words {
            let total = w.0.clone();
            let mass = measure.mass(&total);
            let mut sum = 0.0;
            let mut buf = total.clone();
            for e in 0..space.alphabet_size() as u32 {
                let ok = match buf.last() {
                    Some(&last) => space.admissible(last, e),
                    None => true,
                };
                if ok {
                    buf.push(e);
                    sum += measure.mass(&buf);
                    buf.pop();
                }
            }
            worst = worst.max((mass - sum).abs());
        }
    }
    worst
}

/// Smallest constant `P ≥ 1` such that
/// `P⁻¹ mass(ω) mass(τ) ≤ mass(ωτ) ≤ P mass(ω) mass(τ)`
/// over all admissible pairs with `|ω| + |τ| ≤ max_pair_len`.
///
/// Returns `+∞` if some admissible concatenation has zero mass while the
/// factors are positive (weak independence fails outright).
pub fn weak_independence_constant<M: CylinderMeasure>(measure: &M, max_pair_len: usize) -> f64 {
    let space = measure.space();
    let mut p = 1.0f64;
    for len_a in 1..max_pair_len {
        let lhs = match space.admissible_words(len_a) {
            Ok(w) => w,
            Err(_) => break,
        };
        for len_b in 1..=(max_pair_len - len_a) {
            let rhs = match space.admissible_words(len_b) {
                Ok(w) => w,
                Err(_) => break,
            };
            for wa in &lhs {
                let ma = measure.mass(wa);
                if ma == 0.0 {
                    continue;
                }
                for wb in &rhs {
                    if !space.admissible(*wa.last().unwrap(), wb[0]) {
                        continue;
                    }
                    let mb = measure.mass(wb);
                    if mb == 0.0 {
                        continue;
                    }
                    let joined = wa.concat(wb);
                    let mj = measure.mass(&joined);
                    if mj == 0.0 {
                        return f64::INFINITY;
                    }
                    let ratio = mj / (ma * mb);
                    p = p.max(ratio).max(1.0 / ratio);
                }
            }
        }
    }
    p
}
