//! Ready-made example systems: Bernoulli and Markov shifts, the
//! middle-thirds system, two-ratio systems, the binary coding of Lebesgue
//! measure, a truncated reciprocal-family system on a countable alphabet,
//! expanding interval maps with Markov partitions, and the parabolic pair
//! with its induced uniformly hyperbolic family.
//!
//! Each constructor certifies what can be certified at build time (weak
//! independence constants, summability sums, truncation tails) and records
//! it on the returned system.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{
    ConformalIFS, ContractionMap, GeometryError, Mobius, ParabolicIndex, PiecewiseMap1d,
};
use crate::math;
use crate::symbolic::{
    weak_independence_constant, CylinderMeasure, SymbolicError, SymbolicSpace, Word,
};
use crate::thermo::{
    gibbs_measure, BernoulliMeasure, GibbsState, MarkovMeasure, Potential, ThermoError,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GalleryError {
    #[error("unknown system `{0}`")]
    UnknownSystem(String),

    #[error("invalid parameter: {0}")]
    BadParameter(String),

    #[error("induced potential is not summable at t = {t}: requires t > {threshold}")]
    NonSummable { t: f64, threshold: f64 },

    #[error("branch {branch} image {image_lo}..{image_hi} is not a union of cells")]
    NonMarkovBranch {
        branch: usize,
        image_lo: f64,
        image_hi: f64,
    },

    #[error(transparent)]
    Symbolic(#[from] SymbolicError),

    #[error(transparent)]
    Thermo(#[from] ThermoError),

    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Any of the measure families the gallery hands out.
#[derive(Debug, Clone)]
pub enum Measure {
    Bernoulli(BernoulliMeasure),
    Markov(MarkovMeasure),
    Gibbs(GibbsState),
}

impl CylinderMeasure for Measure {
    fn space(&self) -> &SymbolicSpace {
        match self {
            Measure::Bernoulli(m) => m.space(),
            Measure::Markov(m) => m.space(),
            Measure::Gibbs(m) => m.space(),
        }
    }

    fn mass(&self, word: &[u32]) -> f64 {
        match self {
            Measure::Bernoulli(m) => m.mass(word),
            Measure::Markov(m) => m.mass(word),
            Measure::Gibbs(m) => m.mass(word),
        }
    }

    fn markov_order(&self) -> Option<usize> {
        match self {
            Measure::Bernoulli(m) => m.markov_order(),
            Measure::Markov(m) => m.markov_order(),
            Measure::Gibbs(m) => m.markov_order(),
        }
    }
}

/// Certified record of the tail condition `Σ_e μ([e])/D(e)^β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionB {
    pub beta: f64,
    /// The (truncated) sum; finite by construction on finite alphabets.
    pub sum: f64,
}

/// A named example system with its certifications.
#[derive(Debug, Clone)]
pub struct GallerySystem {
    pub name: String,
    pub space: SymbolicSpace,
    pub measure: Measure,
    pub ifs: Option<ConformalIFS>,
    /// Forward interval map, when the system is the coding of one.
    pub map: Option<PiecewiseMap1d>,
    /// What the system is, in words.
    pub notes: String,
    /// Weak-independence constant certified over word pairs (1 exactly for
    /// product measures).
    pub weak_independence: f64,
    pub condition_b: Option<ConditionB>,
    /// Mass beyond the truncation for truncated countable-alphabet systems.
    pub tail_mass: Option<f64>,
}

const PAIR_CERT_LEN: usize = 8;

impl GallerySystem {
    /// The distortion constant report of the attached family, when any.
    pub fn distortion_report(&self, max_len: usize) -> Option<f64> {
        self.ifs.as_ref().map(|ifs| ifs.distortion_constant(max_len))
    }
}

/// Product measure on a full shift.
pub fn bernoulli(probs: &[f64]) -> Result<GallerySystem, GalleryError> {
    let measure = BernoulliMeasure::new(probs)
        .map_err(|_| GalleryError::BadParameter("probabilities must sum to 1".into()))?;
    let space = measure.space().clone();
    Ok(GallerySystem {
        name: format!("bernoulli({})", probs.len()),
        space,
        measure: Measure::Bernoulli(measure),
        ifs: None,
        map: None,
        notes: "product measure on the full shift".into(),
        weak_independence: 1.0,
        condition_b: None,
        tail_mass: None,
    })
}

/// Stationary Markov chain; the incidence matrix is the support of the
/// transition matrix.
pub fn markov(rows: &[Vec<f64>]) -> Result<GallerySystem, GalleryError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(GalleryError::BadParameter(
            "transition matrix must be square".into(),
        ));
    }
    let incidence: Vec<Vec<bool>> = rows
        .iter()
        .map(|r| r.iter().map(|&p| p > 0.0).collect())
        .collect();
    let space = SymbolicSpace::from_incidence(&incidence)?;
    let measure = MarkovMeasure::new(&space, rows)?;
    let p = weak_independence_constant(&measure, PAIR_CERT_LEN);
    Ok(GallerySystem {
        name: format!("markov({n})"),
        space,
        measure: Measure::Markov(measure),
        ifs: None,
        map: None,
        notes: "stationary Markov chain on the support of its transitions".into(),
        weak_independence: p,
        condition_b: None,
        tail_mass: None,
    })
}

/// The maximal-entropy chain of the golden-mean space, built from the
/// Perron data of the incidence matrix.
pub fn golden_parry() -> Result<GallerySystem, GalleryError> {
    let space = SymbolicSpace::golden_mean();
    let f = Potential::constant(&space, 0.0);
    let gibbs = gibbs_measure(&space, &f)?;
    // Express it as an explicit chain for exact-oracle workflows.
    let q00 = gibbs.mass(&[0, 0]) / gibbs.mass(&[0]);
    let q01 = 1.0 - q00;
    let rows = vec![vec![q00, q01], vec![1.0, 0.0]];
    let measure = MarkovMeasure::new(&space, &rows)?;
    let p = weak_independence_constant(&measure, PAIR_CERT_LEN);
    Ok(GallerySystem {
        name: "golden-parry".into(),
        space,
        measure: Measure::Markov(measure),
        ifs: None,
        map: None,
        notes: "maximal-entropy chain of the golden-mean space".into(),
        weak_independence: p,
        condition_b: None,
        tail_mass: None,
    })
}

fn condition_b_sum<M: CylinderMeasure>(ifs: &ConformalIFS, measure: &M, beta: f64) -> ConditionB {
    let sum = (0..ifs.maps().len() as u32)
        .map(|e| {
            let d = ifs.cylinder_geometry(&Word(vec![e])).unwrap().diameter;
            measure.mass(&[e]) / math::powf(d, beta)
        })
        .sum();
    ConditionB { beta, sum }
}

/// The middle-thirds system: ratios 1/3 at both ends of `[0, 1]`, uniform
/// weights.
pub fn cantor() -> Result<GallerySystem, GalleryError> {
    let ifs =
        ConformalIFS::similarities_1d((0.0, 1.0), &[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)])?;
    let measure = BernoulliMeasure::new(&[0.5, 0.5]).unwrap();
    let cond_b = condition_b_sum(&ifs, &measure, 1.0);
    Ok(GallerySystem {
        name: "cantor".into(),
        space: ifs.space().clone(),
        measure: Measure::Bernoulli(measure),
        ifs: Some(ifs),
        map: None,
        notes: "middle-thirds system with uniform weights".into(),
        weak_independence: 1.0,
        condition_b: Some(cond_b),
        tail_mass: None,
    })
}

/// Two contractions of `[0, 1]` with distinct ratios, anchored at the two
/// endpoints, with optional weights (uniform by default).
pub fn two_ratio(r1: f64, r2: f64, weights: Option<&[f64]>) -> Result<GallerySystem, GalleryError> {
    let ifs = ConformalIFS::similarities_1d((0.0, 1.0), &[(r1, 0.0), (r2, 1.0 - r2)])?;
    let probs = match weights {
        Some(w) => w.to_vec(),
        None => vec![0.5, 0.5],
    };
    let measure = BernoulliMeasure::new(&probs)
        .map_err(|_| GalleryError::BadParameter("weights must sum to 1".into()))?;
    let cond_b = condition_b_sum(&ifs, &measure, 1.0);
    Ok(GallerySystem {
        name: format!("two-ratio({r1},{r2})"),
        space: ifs.space().clone(),
        measure: Measure::Bernoulli(measure),
        ifs: Some(ifs),
        map: None,
        notes: "endpoint-anchored pair of contractions with distinct ratios".into(),
        weak_independence: 1.0,
        condition_b: Some(cond_b),
        tail_mass: None,
    })
}

/// Lebesgue measure through the binary coding of `[0, 1]`, with the angle
/// doubling map attached as the forward dynamics.
pub fn binary_lebesgue() -> Result<GallerySystem, GalleryError> {
    let ifs = ConformalIFS::similarities_1d((0.0, 1.0), &[(0.5, 0.0), (0.5, 0.5)])?;
    let measure = BernoulliMeasure::new(&[0.5, 0.5]).unwrap();
    let cond_b = condition_b_sum(&ifs, &measure, 1.0);
    Ok(GallerySystem {
        name: "binary-lebesgue".into(),
        space: ifs.space().clone(),
        measure: Measure::Bernoulli(measure),
        ifs: Some(ifs),
        map: Some(PiecewiseMap1d::expanding_mod_one(2)),
        notes: "Lebesgue measure under the binary coding; doubling map attached".into(),
        weak_independence: 1.0,
        condition_b: Some(cond_b),
        tail_mass: None,
    })
}

/// Truncation of the reciprocal family `x ↦ 1/(n + x)`, `n = 1..=n_max`,
/// carrying the product weights `∝ (sup|φ′_n|)^t` and reporting the mass the
/// truncation discards. No rigorous truncation-error bound is claimed.
pub fn gauss_truncated(n_max: usize, t: f64) -> Result<GallerySystem, GalleryError> {
    if n_max == 0 || n_max > 10_000 {
        return Err(GalleryError::BadParameter(
            "truncation must be between 1 and 10^4".into(),
        ));
    }
    if !(t > 0.5) {
        return Err(GalleryError::BadParameter(
            "weights need t > 1/2 to be summable".into(),
        ));
    }
    let maps: Vec<ContractionMap> = (1..=n_max)
        .map(|n| ContractionMap::Mobius1d(Mobius::new(0.0, 1.0, 1.0, n as f64)))
        .collect();
    let space = SymbolicSpace::full_shift(n_max);
    let ifs = ConformalIFS::new(vec![(0.0, 1.0)], maps, space.clone())?;
    // Weights ∝ sup|φ'_n|^t = n^{-2t}; the discarded raw mass is bounded by
    // the integral tail ∫_{n_max}^∞ x^{-2t} dx.
    let weights: Vec<f64> = (1..=n_max)
        .map(|n| math::powf(n as f64, -2.0 * t))
        .collect();
    let z: f64 = weights.iter().sum();
    let raw_tail = math::powf(n_max as f64, 1.0 - 2.0 * t) / (2.0 * t - 1.0);
    let tail_mass = raw_tail / (z + raw_tail);
    let probs: Vec<f64> = weights.iter().map(|w| w / z).collect();
    let measure = BernoulliMeasure::new(&probs)
        .map_err(|_| GalleryError::BadParameter("weight normalisation failed".into()))?;
    // Borderline record: at β = 1/2 and t = 1 the untruncated series decays
    // like 1/n, so the truncated sum grows logarithmically with n_max.
    let cond_b = condition_b_sum(&ifs, &measure, 0.5);
    Ok(GallerySystem {
        name: format!("gauss-truncated({n_max})"),
        space,
        measure: Measure::Bernoulli(measure),
        ifs: Some(ifs),
        map: None,
        notes: "truncated reciprocal family with geometric product weights".into(),
        weak_independence: 1.0,
        condition_b: Some(cond_b),
        tail_mass: Some(tail_mass),
    })
}

/// Inverse branches of a piecewise-expanding Markov interval map, with the
/// covering relations as incidence: the cylinder structure of the map's
/// coding.
pub fn markov_partition_1d(map: &PiecewiseMap1d) -> Result<ConformalIFS, GalleryError> {
    let branches = map.branches();
    let n = branches.len();
    let cells: Vec<(f64, f64)> = branches.iter().map(|b| (b.lo, b.hi)).collect();
    let tol = 1e-9;
    // Branch images must be unions of cells; record which cells each image
    // covers.
    let mut incidence = vec![vec![false; n]; n];
    for (i, _) in branches.iter().enumerate() {
        let (img_lo, img_hi) = map.branch_image(i);
        let starts = cells.iter().any(|&(lo, _)| (lo - img_lo).abs() < tol)
            || (img_lo - map.seed().0).abs() < tol;
        let ends = cells.iter().any(|&(_, hi)| (hi - img_hi).abs() < tol)
            || (img_hi - map.seed().1).abs() < tol;
        if !starts || !ends {
            return Err(GalleryError::NonMarkovBranch {
                branch: i,
                image_lo: img_lo,
                image_hi: img_hi,
            });
        }
        for (j, &(lo, hi)) in cells.iter().enumerate() {
            if lo >= img_lo - tol && hi <= img_hi + tol {
                incidence[i][j] = true;
            }
        }
        if incidence[i].iter().all(|&x| !x) {
            return Err(GalleryError::NonMarkovBranch {
                branch: i,
                image_lo: img_lo,
                image_hi: img_hi,
            });
        }
    }
    let space = SymbolicSpace::from_incidence(&incidence)?;
    let maps: Vec<ContractionMap> = branches
        .iter()
        .map(|b| ContractionMap::Mobius1d(b.map.inverse().normalize()))
        .collect();
    // The terminal box of a symbol is its branch image: hulls then reproduce
    // the cells of the coding exactly.
    let terminals: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|i| {
            let (lo, hi) = map.branch_image(i);
            vec![(lo, hi)]
        })
        .collect();
    Ok(ConformalIFS::with_terminals(
        vec![map.seed()],
        maps,
        space,
        terminals,
    )?)
}

/// Is the induced geometric potential summable at exponent `t` for petal
/// exponent `beta`? The threshold is exactly `β/(β+1)`.
pub fn induced_potential_summable(t: f64, beta: f64) -> bool {
    t > beta / (beta + 1.0)
}

/// Finiteness classification of the invariant measure of the parabolic
/// system at exponent `t`, relative to a dimension-root bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinitenessCase {
    /// `β/(β+1) < t <` (dimension root): finite invariant mass.
    Interior,
    /// `t` at the dimension root with the root above `2β/(β+1)`.
    Boundary,
    /// Outside both regimes, or not decidable from the bracket.
    OutsideOrUnknown,
}

/// The inducing data of the parabolic pair.
#[derive(Debug, Clone)]
pub struct ParabolicSpec {
    /// The raw two-map system: branch 0 fixes the origin with unit
    /// derivative (petal exponent 1), branch 1 is uniformly contracting.
    pub base: ConformalIFS,
    pub beta: f64,
    pub t: f64,
    pub n_trunc: usize,
    /// Induced alphabet as words of the base system: `0ⁿ1` for
    /// `n = 1..=n_trunc`, then the hyperbolic symbol `1`.
    pub induced_words: Vec<Word>,
    /// Induced potential values per induced symbol: `t·ln sup|φ′_block|`.
    pub zeta_star: Vec<f64>,
    pub summable: bool,
    /// Gibbs-weight mass beyond the truncation (integral-bound estimate).
    pub tail_mass: f64,
    /// Dimension-root bracket of the truncated induced family.
    pub bowen_bracket: (f64, f64),
    pub finiteness: FinitenessCase,
}

/// The parabolic pair `x ↦ x/(1+x)` (parabolic at 0, petal exponent 1) and
/// `x ↦ (x+1)/2` on `[0, 1]`, together with its induced uniformly
/// hyperbolic family on the blocks `0ⁿ1` and the Gibbs state of the induced
/// potential at exponent `t`.
pub fn make_parabolic_farey(
    t: f64,
    n_trunc: usize,
) -> Result<(ParabolicSpec, GallerySystem), GalleryError> {
    let beta = 1.0;
    if !induced_potential_summable(t, beta) {
        return Err(GalleryError::NonSummable {
            t,
            threshold: beta / (beta + 1.0),
        });
    }
    if !(1..=100_000).contains(&n_trunc) {
        return Err(GalleryError::BadParameter(
            "truncation must be between 1 and 10^5".into(),
        ));
    }
    let parabolic_branch = Mobius::new(1.0, 0.0, 1.0, 1.0); // x/(1+x)
    let hyperbolic_branch = Mobius::affine(0.5, 0.5); // (x+1)/2
    let base = ConformalIFS::new(
        vec![(0.0, 1.0)],
        vec![
            ContractionMap::Mobius1d(parabolic_branch),
            ContractionMap::Mobius1d(hyperbolic_branch),
        ],
        SymbolicSpace::full_shift(2),
    )?
    .with_parabolic(vec![ParabolicIndex {
        symbol: 0,
        petal_exponent: beta,
    }]);

    // Induced maps: blocks 0ⁿ1 compose to (x+1)/(nx + n + 2) in closed form;
    // the lone hyperbolic symbol stays.
    let mut induced_words = Vec::with_capacity(n_trunc + 1);
    let mut maps = Vec::with_capacity(n_trunc + 1);
    for n in 1..=n_trunc {
        let nf = n as f64;
        let mut w = vec![0u32; n];
        w.push(1);
        induced_words.push(Word(w));
        maps.push(ContractionMap::Mobius1d(
            Mobius::new(1.0, 1.0, nf, nf + 2.0).normalize(),
        ));
    }
    induced_words.push(Word(vec![1]));
    maps.push(ContractionMap::Mobius1d(hyperbolic_branch));
    let induced_space = SymbolicSpace::full_shift(n_trunc + 1);
    let induced_ifs = ConformalIFS::new(vec![(0.0, 1.0)], maps, induced_space.clone())?;

    // Induced potential values and Gibbs weights ∝ exp(ζ*) = sup|φ'|^t.
    let zeta_star: Vec<f64> = induced_ifs
        .deriv_ranges()
        .iter()
        .map(|&(_, sup)| t * math::ln(sup))
        .collect();
    let potential = Potential::depth1(&induced_space, &zeta_star)?;
    let gibbs = gibbs_measure(&induced_space, &potential)?;

    // Raw discarded weight: Σ_{n > N} sup|φ'_{0ⁿ1}|^t with sup = 2/(n+2)²,
    // bounded by the integral tail.
    let z: f64 = zeta_star.iter().map(|&v| math::exp(v)).sum();
    let raw_tail = math::powf(2.0, t) * math::powf(n_trunc as f64 + 2.0, 1.0 - 2.0 * t)
        / (2.0 * t - 1.0);
    let tail_mass = raw_tail / (z + raw_tail);

    let bowen_bracket = induced_ifs.moran_bracket().unwrap_or((0.0, f64::INFINITY));
    let finiteness = if t < bowen_bracket.0 {
        FinitenessCase::Interior
    } else if t >= bowen_bracket.0
        && t <= bowen_bracket.1
        && bowen_bracket.1 > 2.0 * beta / (beta + 1.0)
    {
        FinitenessCase::Boundary
    } else {
        FinitenessCase::OutsideOrUnknown
    };

    let system = GallerySystem {
        name: format!("farey-induced(t={t})"),
        space: induced_space,
        measure: Measure::Gibbs(gibbs),
        ifs: Some(induced_ifs),
        map: None,
        notes: "induced hyperbolic family of the parabolic pair, with the \
                Gibbs state of the induced geometric potential"
            .into(),
        weak_independence: 1.0,
        condition_b: None,
        tail_mass: Some(tail_mass),
    };
    let spec = ParabolicSpec {
        base,
        beta,
        t,
        n_trunc,
        induced_words,
        zeta_star,
        summable: true,
        tail_mass,
        bowen_bracket,
        finiteness,
    };
    Ok((spec, system))
}

/// Loose-typed parameters for name-based construction (the CLI's config
/// values).
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Number(f64),
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

pub type Params = BTreeMap<String, ParamValue>;

fn number(params: &Params, key: &str) -> Option<f64> {
    match params.get(key) {
        Some(ParamValue::Number(x)) => Some(*x),
        _ => None,
    }
}

/// Construct a gallery system by name and parameter map.
pub fn make_system(name: &str, params: &Params) -> Result<GallerySystem, GalleryError> {
    match name {
        "bernoulli" => match params.get("p") {
            Some(ParamValue::Vector(p)) => bernoulli(p),
            _ => Err(GalleryError::BadParameter(
                "bernoulli requires a probability vector `p`".into(),
            )),
        },
        "markov" => match params.get("rows") {
            Some(ParamValue::Matrix(rows)) => markov(rows),
            _ => Err(GalleryError::BadParameter(
                "markov requires a transition matrix `rows`".into(),
            )),
        },
        "golden-parry" => golden_parry(),
        "two-state-cycle" => markov(&[vec![0.0, 1.0], vec![1.0, 0.0]]),
        "cantor" => cantor(),
        "two-ratio" => {
            let r1 = number(params, "r1").unwrap_or(0.5);
            let r2 = number(params, "r2").unwrap_or(0.25);
            two_ratio(r1, r2, None)
        }
        "binary-lebesgue" => binary_lebesgue(),
        "gauss-truncated" => {
            let n = number(params, "n").unwrap_or(100.0) as usize;
            let t = number(params, "t").unwrap_or(1.0);
            gauss_truncated(n, t)
        }
        "farey-induced" => {
            let t = number(params, "t").unwrap_or(0.8);
            let n = number(params, "n_trunc").unwrap_or(1000.0) as usize;
            make_parabolic_farey(t, n).map(|(_, system)| system)
        }
        other => Err(GalleryError::UnknownSystem(other.to_string())),
    }
}

/// `(name, parameters, description)` for every nameable system.
pub fn system_catalog() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        (
            "bernoulli",
            "p: vector",
            "product measure on the full shift over len(p) symbols",
        ),
        (
            "markov",
            "rows: matrix",
            "stationary chain; incidence is the support of the rows",
        ),
        (
            "golden-parry",
            "",
            "maximal-entropy chain of the golden-mean space",
        ),
        ("two-state-cycle", "", "deterministic two-state rotation"),
        (
            "cantor",
            "",
            "middle-thirds system on [0,1] with uniform weights",
        ),
        (
            "two-ratio",
            "r1, r2: numbers",
            "endpoint-anchored contractions with distinct ratios",
        ),
        (
            "binary-lebesgue",
            "",
            "Lebesgue measure via the binary coding; doubling map attached",
        ),
        (
            "gauss-truncated",
            "n, t: numbers",
            "truncated reciprocal family with weights ∝ sup|φ'|^t",
        ),
        (
            "farey-induced",
            "t, n_trunc: numbers",
            "induced hyperbolic family of the parabolic pair",
        ),
    ]
}

#[cfg(test)]
mod tests;
