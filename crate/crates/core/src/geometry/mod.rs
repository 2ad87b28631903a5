//! Contraction families on an ambient interval/box: cylinder geometry,
//! coding map, separation checks, the dimension-equation root, and certified
//! interval bounds on projected measures of balls and annuli.
//!
//! All geometric predicates are decided on axis-aligned hulls of cylinder
//! images. Hulls contain the true images, so every derived bound errs on the
//! announced side and tightens monotonically as cylinders are refined; no
//! exact real arithmetic is attempted.

mod bounds;
mod interval_map;
mod map;

pub use bounds::{
    annulus_measure_bounds, ball_measure_bounds, region_measure_bounds, MeasureInterval, Region,
    WalkParams,
};
pub use interval_map::{Branch1d, PiecewiseMap1d};
pub use map::{ContractionMap, Mobius};

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::symbolic::{SymbolicSpace, Word};
use crate::thermo::{self, Potential, ThermoError};

use map::Composed;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("map {index} is invalid: {reason}")]
    InvalidMap { index: usize, reason: &'static str },

    #[error("invalid seed set: {0}")]
    InvalidSeed(&'static str),

    #[error("word is not admissible for this system")]
    Inadmissible,

    #[error("cylinder prefix too coarse: radius {radius} exceeds tolerance {tol}")]
    PrefixTooShort { radius: f64, tol: f64 },

    #[error("pressure has no sign change on the bracket: P(low) = {p_low}, P(high) = {p_high}")]
    NoSignChange { p_low: f64, p_high: f64 },

    #[error(transparent)]
    Thermo(#[from] ThermoError),
}

/// Opaque incremental composition along a word; see
/// [`ConformalIFS::root_cursor`].
#[derive(Debug, Clone)]
pub struct CylinderCursor(Composed);

/// A parabolic member of the family: the map fixes a point with unit
/// derivative and its iterates decay polynomially with the petal exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicIndex {
    pub symbol: u32,
    pub petal_exponent: f64,
}

/// A finite family of contractions of a seed interval/box into itself,
/// with Markov constraints from a symbolic space.
#[derive(Debug, Clone)]
pub struct ConformalIFS {
    seed: Vec<(f64, f64)>,
    maps: Vec<ContractionMap>,
    space: SymbolicSpace,
    /// Per-symbol terminal boxes: the hull of a word is the composed image
    /// of the terminal box of its last symbol. Defaults to the seed; Markov
    /// partitions install the branch-image constraints here.
    terminal: Vec<Vec<(f64, f64)>>,
    deriv_ranges: Vec<(f64, f64)>,
    contraction: f64,
    parabolic: Vec<ParabolicIndex>,
    mobius_family: bool,
    all_similarity: bool,
}

/// Exact-as-computed geometric data of one cylinder.
#[derive(Debug, Clone)]
pub struct CylinderGeometry {
    pub word: Word,
    /// Axis-aligned hull of the cylinder image, in ambient coordinates.
    pub hull: Vec<(f64, f64)>,
    /// Diameter normalised by the seed diameter.
    pub diameter: f64,
    /// `[inf |φ′_ω|, sup |φ′_ω|]` from interval products of per-map bounds.
    pub deriv_range: (f64, f64),
}

/// A coded point with its certification radius.
#[derive(Debug, Clone)]
pub struct CodedPoint {
    pub point: Vec<f64>,
    pub radius: f64,
}

/// A first-level overlap witness: the two symbols and the open box where
/// their hull interiors meet.
pub type OverlapWitness = (u32, u32, Vec<(f64, f64)>);

/// Outcome of the open-set-condition check.
#[derive(Debug, Clone)]
pub struct OscReport {
    /// First-level images have pairwise disjoint interiors (as certified at
    /// hull level).
    pub holds: bool,
    /// Some cylinder hull lies strictly inside the open seed, so limit-set
    /// points meet the interior.
    pub strong: bool,
    /// False when overlapping hulls of rotated maps make the hull-level test
    /// inconclusive.
    pub decidable: bool,
    pub overlap_witness: Option<OverlapWitness>,
    pub interior_witness: Option<Vec<(f64, f64)>>,
}

/// Outcome of the heuristic geometric-irreducibility probe. Never a
/// certificate: residuals come from best-fit lines/spheres through sampled
/// coded points.
#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub ambient_dim: usize,
    pub trivially_satisfied: bool,
    pub line_residual: Option<f64>,
    pub sphere_residual: Option<f64>,
    pub likely_reducible: bool,
}

impl ConformalIFS {
    /// Family on `seed` with Markov constraints from `space`.
    pub fn new(
        seed: Vec<(f64, f64)>,
        maps: Vec<ContractionMap>,
        space: SymbolicSpace,
    ) -> Result<Self, GeometryError> {
        let terminal = vec![seed.clone(); maps.len()];
        Self::with_terminals(seed, maps, space, terminal)
    }

    /// As [`ConformalIFS::new`] with explicit per-symbol terminal boxes
    /// (each must sit inside the seed).
    pub fn with_terminals(
        seed: Vec<(f64, f64)>,
        maps: Vec<ContractionMap>,
        space: SymbolicSpace,
        terminal: Vec<Vec<(f64, f64)>>,
    ) -> Result<Self, GeometryError> {
        if seed.is_empty() || seed.iter().any(|&(lo, hi)| !(lo < hi)) {
            return Err(GeometryError::InvalidSeed(
                "seed must be a nondegenerate interval/box",
            ));
        }
        if maps.is_empty() || maps.len() != space.alphabet_size() {
            return Err(GeometryError::InvalidSeed(
                "need one map per alphabet symbol",
            ));
        }
        if terminal.len() != maps.len() {
            return Err(GeometryError::InvalidSeed(
                "need one terminal box per symbol",
            ));
        }
        let dim = seed.len();
        let mobius_family = maps.iter().any(|m| matches!(m, ContractionMap::Mobius1d(_)));
        if mobius_family && dim != 1 {
            return Err(GeometryError::InvalidSeed(
                "Möbius members require a 1D seed",
            ));
        }
        let mut deriv_ranges = Vec::with_capacity(maps.len());
        let mut contraction = 0.0f64;
        for (i, m) in maps.iter().enumerate() {
            if m.dim() != dim {
                return Err(GeometryError::InvalidMap {
                    index: i,
                    reason: "ambient dimension mismatch",
                });
            }
            let range = m.validate(&seed, i, true)?;
            contraction = contraction.max(range.1);
            deriv_ranges.push(range);
        }
        for (i, t) in terminal.iter().enumerate() {
            let inside = t.len() == dim
                && t.iter()
                    .zip(&seed)
                    .all(|(&(a, b), &(lo, hi))| a >= lo - 1e-12 && b <= hi + 1e-12 && a < b);
            if !inside {
                return Err(GeometryError::InvalidMap {
                    index: i,
                    reason: "terminal box must be a nondegenerate sub-box of the seed",
                });
            }
        }
        let ifs = ConformalIFS {
            all_similarity: !mobius_family,
            seed,
            maps,
            space,
            terminal,
            deriv_ranges,
            contraction,
            parabolic: Vec::new(),
            mobius_family,
        };
        // Each first-level image must land inside the seed and contract it.
        for e in 0..ifs.maps.len() as u32 {
            let geo = ifs.cylinder_geometry(&Word(vec![e]))?;
            let tol = 1e-9 * ifs.diam_seed();
            let ok = geo
                .hull
                .iter()
                .zip(&ifs.seed)
                .all(|(&(a, b), &(lo, hi))| a >= lo - tol && b <= hi + tol);
            if !ok {
                return Err(GeometryError::InvalidMap {
                    index: e as usize,
                    reason: "image of the seed leaves the seed",
                });
            }
            if geo.diameter >= 1.0 - 1e-9 {
                return Err(GeometryError::InvalidMap {
                    index: e as usize,
                    reason: "image does not shrink the seed diameter",
                });
            }
        }
        Ok(ifs)
    }

    /// Full-shift family of 1D orientation-preserving similarities given as
    /// `(ratio, translation)` pairs on `seed`.
    pub fn similarities_1d(
        seed: (f64, f64),
        data: &[(f64, f64)],
    ) -> Result<Self, GeometryError> {
        let maps: Vec<ContractionMap> = data
            .iter()
            .map(|&(r, t)| ContractionMap::similarity_1d(r, true, t))
            .collect();
        ConformalIFS::new(
            vec![seed],
            maps,
            SymbolicSpace::full_shift(data.len()),
        )
    }

    /// Record parabolic indices and their petal exponents.
    pub fn with_parabolic(mut self, parabolic: Vec<ParabolicIndex>) -> Self {
        self.parabolic = parabolic;
        self
    }

    pub fn space(&self) -> &SymbolicSpace {
        &self.space
    }

    pub fn maps(&self) -> &[ContractionMap] {
        &self.maps
    }

    pub fn seed(&self) -> &[(f64, f64)] {
        &self.seed
    }

    pub fn dim(&self) -> usize {
        self.seed.len()
    }

    pub fn parabolic(&self) -> &[ParabolicIndex] {
        &self.parabolic
    }

    /// Uniform derivative bound `λ = max_e sup|φ′_e|` (equals 1 when a
    /// parabolic member is present).
    pub fn contraction(&self) -> f64 {
        self.contraction
    }

    pub fn deriv_ranges(&self) -> &[(f64, f64)] {
        &self.deriv_ranges
    }

    /// Distortion data `(L, α)` of one map on the seed: a bound for
    /// `| |φ′(y)|/|φ′(x)| − 1 | ≤ L‖y−x‖^α`. Zero for similarities, exact
    /// endpoint arithmetic for Möbius members.
    pub fn holder_data(&self, symbol: u32) -> (f64, f64) {
        match &self.maps[symbol as usize] {
            ContractionMap::Similarity { .. } => (0.0, 1.0),
            ContractionMap::Mobius1d(m) => {
                let (lo, hi) = self.seed[0];
                m.holder_data(lo, hi)
            }
        }
    }

    pub fn is_similarity_family(&self) -> bool {
        self.all_similarity
    }

    /// Seed diameter (box diagonal).
    pub fn diam_seed(&self) -> f64 {
        math::sqrt(
            self.seed
                .iter()
                .map(|&(lo, hi)| (hi - lo) * (hi - lo))
                .sum(),
        )
    }

    pub(in crate::geometry) fn identity_composed(&self) -> Composed {
        Composed::identity(self.dim(), self.mobius_family)
    }

    /// Cursor at the empty word, for incremental descent of the cylinder
    /// tree.
    pub fn root_cursor(&self) -> CylinderCursor {
        CylinderCursor(self.identity_composed())
    }

    /// Cursor of `ω·symbol` from the cursor of `ω` (constant-time).
    pub fn extend_cursor(&self, cursor: &CylinderCursor, symbol: u32) -> CylinderCursor {
        CylinderCursor(self.extend_composed(&cursor.0, symbol))
    }

    /// Hull of the cursor's cylinder; `last_symbol` selects the terminal box.
    pub fn cursor_hull(&self, cursor: &CylinderCursor, last_symbol: Option<u32>) -> Vec<(f64, f64)> {
        self.composed_hull(&cursor.0, last_symbol)
    }

    /// Normalised diameter of the cursor's cylinder.
    pub fn cursor_diameter(&self, cursor: &CylinderCursor, last_symbol: Option<u32>) -> f64 {
        self.composed_diameter(&cursor.0, last_symbol)
    }

    /// A point drawn from the projection of `measure`: descend the cylinder
    /// tree by conditional masses until the diameter drops below
    /// `diameter_tol`, then take the hull center.
    pub fn sample_point<M: crate::symbolic::CylinderMeasure>(
        &self,
        measure: &M,
        rng: &mut rand_chacha::ChaCha8Rng,
        diameter_tol: f64,
    ) -> Vec<f64> {
        let mut cursor = self.root_cursor();
        let mut word: Vec<u32> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        let mut symbols: Vec<u32> = Vec::new();
        for _ in 0..4096 {
            weights.clear();
            symbols.clear();
            let candidates: Vec<u32> = match word.last() {
                None => (0..self.maps.len() as u32).collect(),
                Some(&a) => self.space.successors(a).collect(),
            };
            for e in candidates {
                word.push(e);
                let m = measure.mass(&word);
                word.pop();
                if m > 0.0 {
                    weights.push(m);
                    symbols.push(e);
                }
            }
            if symbols.is_empty() {
                break;
            }
            let pick = symbols[crate::rng::categorical(rng, &weights)];
            word.push(pick);
            cursor = self.extend_cursor(&cursor, pick);
            if self.cursor_diameter(&cursor, Some(pick)) <= diameter_tol {
                break;
            }
        }
        let hull = self.cursor_hull(&cursor, word.last().copied());
        hull.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    pub(in crate::geometry) fn extend_composed(&self, c: &Composed, symbol: u32) -> Composed {
        c.then_inner(&self.maps[symbol as usize])
    }

    pub(in crate::geometry) fn composed_hull(&self, c: &Composed, last_symbol: Option<u32>) -> Vec<(f64, f64)> {
        let box_ = match last_symbol {
            Some(e) => &self.terminal[e as usize],
            None => &self.seed,
        };
        c.hull(box_)
    }

    /// Relative diameter of the composed image (normalised by the seed
    /// diameter).
    pub(in crate::geometry) fn composed_diameter(&self, c: &Composed, last_symbol: Option<u32>) -> f64 {
        let box_ = match last_symbol {
            Some(e) => &self.terminal[e as usize],
            None => &self.seed,
        };
        match c {
            Composed::Affine { .. } => {
                let tdiam: f64 = math::sqrt(
                    box_.iter()
                        .map(|&(lo, hi)| (hi - lo) * (hi - lo))
                        .sum(),
                );
                c.diameter_factor(box_) * tdiam / self.diam_seed()
            }
            Composed::Mobius(_) => {
                let hull = c.hull(box_);
                (hull[0].1 - hull[0].0) / (self.seed[0].1 - self.seed[0].0)
            }
        }
    }

    /// Hull, normalised diameter, and derivative range of the cylinder of
    /// `word`.
    pub fn cylinder_geometry(&self, word: &Word) -> Result<CylinderGeometry, GeometryError> {
        if !self.space.is_admissible(word) {
            return Err(GeometryError::Inadmissible);
        }
        let mut composed = self.identity_composed();
        let mut deriv = (1.0, 1.0);
        for &s in word.symbols() {
            composed = self.extend_composed(&composed, s);
            let (lo, hi) = self.deriv_ranges[s as usize];
            deriv = (deriv.0 * lo, deriv.1 * hi);
        }
        let last = word.last().copied();
        Ok(CylinderGeometry {
            word: word.clone(),
            hull: self.composed_hull(&composed, last),
            diameter: self.composed_diameter(&composed, last),
            deriv_range: deriv,
        })
    }

    /// `|φ′_ω(x)|` by the chain rule, together with `φ_ω(x)`; `x` lives in
    /// the terminal set of the last symbol. 1D families only.
    pub fn deriv_at(&self, word: &Word, x: f64) -> Result<(f64, f64), GeometryError> {
        if self.dim() != 1 {
            return Err(GeometryError::InvalidSeed("deriv_at requires a 1D family"));
        }
        if !self.space.is_admissible(word) {
            return Err(GeometryError::Inadmissible);
        }
        let mut y = x;
        let mut d = 1.0f64;
        for &s in word.symbols().iter().rev() {
            match &self.maps[s as usize] {
                ContractionMap::Mobius1d(m) => {
                    d *= m.deriv(y).abs();
                    y = m.eval(y);
                }
                ContractionMap::Similarity {
                    ratio,
                    linear,
                    translation,
                } => {
                    let sign = match linear {
                        Some(l) if l[0] < 0.0 => -1.0,
                        _ => 1.0,
                    };
                    d *= ratio;
                    y = sign * ratio * y + translation[0];
                }
            }
        }
        Ok((d, y))
    }

    /// Center of the cylinder hull with a certification radius (half the
    /// hull diagonal, which in 1D is half the cylinder diameter); every
    /// infinite extension of `word` codes within that radius.
    pub fn code_point(&self, word: &Word, tol: f64) -> Result<CodedPoint, GeometryError> {
        let geo = self.cylinder_geometry(word)?;
        let radius = math::sqrt(
            geo.hull
                .iter()
                .map(|&(lo, hi)| (hi - lo) * (hi - lo))
                .sum::<f64>(),
        ) / 2.0;
        if radius > tol {
            return Err(GeometryError::PrefixTooShort { radius, tol });
        }
        Ok(CodedPoint {
            point: geo.hull.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect(),
            radius,
        })
    }

    /// Empirical distortion constant: the smallest `Q` with
    /// `Q⁻¹ D(ω)D(τ) ≤ D(ωτ) ≤ Q D(ω)D(τ)` over admissible pairs of length
    /// `≤ max_len` (normalised diameters). Exactly 1 for similarity
    /// families, where multiplicativity holds by construction.
    pub fn distortion_constant(&self, max_len: usize) -> f64 {
        if self.all_similarity {
            return 1.0;
        }
        let mut q = 1.0f64;
        for la in 1..=max_len {
            let lhs = match self.space.admissible_words_capped(la, 20_000) {
                Ok(w) => w,
                Err(_) => break,
            };
            for lb in 1..=max_len {
                let rhs = match self.space.admissible_words_capped(lb, 20_000) {
                    Ok(w) => w,
                    Err(_) => break,
                };
                for wa in &lhs {
                    let da = self.cylinder_geometry(wa).unwrap().diameter;
                    for wb in &rhs {
                        if !self.space.admissible(*wa.last().unwrap(), wb[0]) {
                            continue;
                        }
                        let db = self.cylinder_geometry(wb).unwrap().diameter;
                        let dab = self.cylinder_geometry(&wa.concat(wb)).unwrap().diameter;
                        let ratio = dab / (da * db);
                        q = q.max(ratio).max(1.0 / ratio);
                    }
                }
            }
        }
        q
    }

    /// Open-set-condition report from first-level hulls; exact for 1D and
    /// axis-aligned similarity systems.
    pub fn check_osc(&self) -> OscReport {
        let n = self.maps.len();
        let hulls: Vec<Vec<(f64, f64)>> = (0..n as u32)
            .map(|e| {
                let c = self.extend_composed(&self.identity_composed(), e);
                self.composed_hull(&c, Some(e))
            })
            .collect();
        let rotated = |e: usize| match &self.maps[e] {
            ContractionMap::Similarity { linear: Some(l), .. } => {
                let d = self.dim();
                (0..d * d).any(|i| {
                    let expect = if i % d == i / d { 1.0 } else { 0.0 };
                    (l[i].abs() - expect).abs() > 1e-12 && (l[i] - expect).abs() > 1e-12
                })
            }
            _ => false,
        };
        let mut holds = true;
        let mut decidable = true;
        let mut overlap_witness = None;
        for a in 0..n {
            for b in a + 1..n {
                let mut region = Vec::with_capacity(self.dim());
                let mut open_overlap = true;
                for k in 0..self.dim() {
                    let lo = hulls[a][k].0.max(hulls[b][k].0);
                    let hi = hulls[a][k].1.min(hulls[b][k].1);
                    if !(lo < hi) {
                        open_overlap = false;
                        break;
                    }
                    region.push((lo, hi));
                }
                if open_overlap {
                    if rotated(a) || rotated(b) {
                        // Bounding boxes of rotated images may overlap while
                        // the images do not; the hull-level test cannot tell.
                        decidable = false;
                    } else {
                        holds = false;
                        if overlap_witness.is_none() {
                            overlap_witness = Some((a as u32, b as u32, region));
                        }
                    }
                }
            }
        }
        // Strong part: search short words for a hull strictly inside the
        // open seed; all extensions then code into the interior.
        let mut interior_witness = None;
        'depth: for len in 1..=6usize {
            let words = match self.space.admissible_words_capped(len, 10_000) {
                Ok(w) => w,
                Err(_) => break,
            };
            for w in words {
                let hull = match self.cylinder_geometry(&w) {
                    Ok(g) => g.hull,
                    Err(_) => continue,
                };
                let strictly_inside = hull
                    .iter()
                    .zip(&self.seed)
                    .all(|(&(a, b), &(lo, hi))| lo < a && b < hi);
                if strictly_inside {
                    interior_witness = Some(hull);
                    break 'depth;
                }
            }
        }
        OscReport {
            holds: holds && decidable,
            strong: interior_witness.is_some(),
            decidable,
            overlap_witness,
            interior_witness,
        }
    }

    /// Depth-`k` tabulation of the geometric potential
    /// `ω ↦ ln |φ′_{ω₁}(code(σω))|`, the exponent behind the dimension
    /// equation. Depth 1 is exact for similarities.
    pub fn geometric_potential(&self, depth: usize) -> Result<Potential, GeometryError> {
        let space = &self.space;
        if self.all_similarity || depth == 1 {
            let vals: Vec<f64> = self
                .deriv_ranges
                .iter()
                .map(|&(_, hi)| math::ln(hi))
                .collect();
            return Potential::depth1(space, &vals).map_err(GeometryError::Thermo);
        }
        let pot = Potential::from_fn(space, depth, |w| {
            if !space.is_admissible(w) {
                return 0.0;
            }
            let tail = Word(w[1..].to_vec());
            let geo = self.cylinder_geometry(&tail).unwrap();
            let x = 0.5 * (geo.hull[0].0 + geo.hull[0].1);
            let (d, _) = self
                .deriv_at(&Word(vec![w[0]]), x)
                .unwrap_or((self.deriv_ranges[w[0] as usize].1, x));
            math::ln(d)
        })
        .map_err(GeometryError::Thermo)?;
        Ok(pot)
    }

    /// Root `b` of the pressure function `t ↦ P(t·ζ)` on `[0, dim + 1]` by
    /// bisection to `1e-12`; `P` is strictly decreasing for contractions.
    pub fn bowen_parameter(&self) -> Result<f64, GeometryError> {
        self.bowen_parameter_with_depth(if self.all_similarity { 1 } else { 4 })
    }

    /// As [`ConformalIFS::bowen_parameter`] with an explicit approximation
    /// depth for the geometric potential of non-similarity families.
    pub fn bowen_parameter_with_depth(&self, depth: usize) -> Result<f64, GeometryError> {
        let zeta = self.geometric_potential(depth)?;
        let space = &self.space;
        let pressure_at = |t: f64| -> Result<f64, GeometryError> {
            Ok(thermo::pressure(space, &zeta.scaled(t))
                .map_err(GeometryError::Thermo)?
                .value)
        };
        let mut lo = 0.0f64;
        let mut hi = self.dim() as f64 + 1.0;
        let p_lo = pressure_at(lo)?;
        if p_lo.abs() <= 1e-13 {
            return Ok(0.0);
        }
        let p_hi = pressure_at(hi)?;
        if p_lo < 0.0 || p_hi > 0.0 {
            return Err(GeometryError::NoSignChange {
                p_low: p_lo,
                p_high: p_hi,
            });
        }
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if pressure_at(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Residual `Σ_e (sup|φ′_e|)^t − 1` of the dimension equation; zero at
    /// the Bowen parameter of a similarity family.
    pub fn moran_residual(&self, t: f64) -> f64 {
        self.deriv_ranges
            .iter()
            .map(|&(_, hi)| math::powf(hi, t))
            .sum::<f64>()
            - 1.0
    }

    /// Bracket of the dimension-equation root from per-map derivative
    /// bounds: the roots of `Σ (inf|φ′_e|)^t = 1` and `Σ (sup|φ′_e|)^t = 1`.
    /// Both coincide with the Bowen parameter for similarity families; for
    /// distorted families they sandwich it.
    pub fn moran_bracket(&self) -> Option<(f64, f64)> {
        let root = |bounds: Vec<f64>| -> Option<f64> {
            let f = |t: f64| {
                bounds
                    .iter()
                    .map(|&b| math::powf(b, t))
                    .sum::<f64>()
                    - 1.0
            };
            if f(0.0) <= 0.0 {
                return Some(0.0);
            }
            let mut hi = 1.0f64;
            while f(hi) > 0.0 {
                hi *= 2.0;
                if hi > 1e6 {
                    return None;
                }
            }
            let mut lo = 0.0f64;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Some(0.5 * (lo + hi))
        };
        let lower = root(self.deriv_ranges.iter().map(|&(lo, _)| lo).collect())?;
        let upper = root(self.deriv_ranges.iter().map(|&(_, hi)| hi).collect())?;
        Some((lower, upper))
    }

    /// Heuristic probe for whether the limit set could sit inside a line or
    /// a geometric sphere (never a certificate).
    pub fn geometric_irreducibility_probe(&self, sample_count: usize, seed: u64) -> ProbeReport {
        if self.dim() == 1 {
            // In 1D the convention is: an infinite limit set satisfies the
            // requirement; a single fixed point does not.
            let mut fixed = Vec::new();
            for e in 0..self.maps.len() as u32 {
                let mut c = self.identity_composed();
                for _ in 0..64 {
                    c = self.extend_composed(&c, e);
                }
                let hull = self.composed_hull(&c, Some(e));
                fixed.push(0.5 * (hull[0].0 + hull[0].1));
            }
            let distinct = fixed
                .iter()
                .any(|&x| (x - fixed[0]).abs() > 1e-12 * self.diam_seed());
            return ProbeReport {
                ambient_dim: 1,
                trivially_satisfied: distinct,
                line_residual: None,
                sphere_residual: None,
                likely_reducible: !distinct,
            };
        }
        let points = self.sample_coded_points(sample_count, seed);
        let line = line_fit_residual(&points);
        let sphere = sphere_fit_residual(&points);
        let best = match (line, sphere) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => f64::INFINITY,
        };
        ProbeReport {
            ambient_dim: self.dim(),
            trivially_satisfied: false,
            line_residual: line,
            sphere_residual: sphere,
            likely_reducible: best < 1e-9,
        }
    }

    fn sample_coded_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = crate::rng::stream(seed, 0);
        let depth_tol = 1e-10;
        let mut out = Vec::with_capacity(count);
        for _ in 0..count.max(3) {
            let mut c = self.identity_composed();
            let mut last: Option<u32> = None;
            for _ in 0..4096 {
                let next: Vec<u32> = match last {
                    None => (0..self.maps.len() as u32).collect(),
                    Some(a) => self.space.successors(a).collect(),
                };
                let pick = next[(crate::rng::uniform(&mut rng) * next.len() as f64) as usize
                    % next.len()];
                c = self.extend_composed(&c, pick);
                last = Some(pick);
                if self.composed_diameter(&c, last) <= depth_tol {
                    break;
                }
            }
            let hull = self.composed_hull(&c, last);
            out.push(hull.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect());
        }
        out
    }
}

/// Max point distance to the best-fit hyperplane (total least squares via
/// the smallest principal direction of the covariance).
fn line_fit_residual(points: &[Vec<f64>]) -> Option<f64> {
    let n = points.len();
    if n < 3 {
        return None;
    }
    let d = points[0].len();
    let mut mean = vec![0.0; d];
    for p in points {
        for i in 0..d {
            mean[i] += p[i];
        }
    }
    for m in mean.iter_mut() {
        *m /= n as f64;
    }
    let mut cov = vec![0.0; d * d];
    for p in points {
        for i in 0..d {
            for j in 0..d {
                cov[i * d + j] += (p[i] - mean[i]) * (p[j] - mean[j]);
            }
        }
    }
    // Smallest eigenvector of C = dominant eigenvector of (tr C + 1)I − C.
    let tr: f64 = (0..d).map(|i| cov[i * d + i]).sum();
    let mut shifted = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            shifted[i * d + j] = if i == j { tr + 1.0 } else { 0.0 } - cov[i * d + j];
        }
    }
    // Asymmetric deterministic start so no coordinate hyperplane or diagonal
    // traps the iteration.
    let mut v: Vec<f64> = (0..d).map(|i| math::sqrt(i as f64 + 1.0)).collect();
    for _ in 0..500 {
        let mut w = vec![0.0; d];
        for i in 0..d {
            for j in 0..d {
                w[i] += shifted[i * d + j] * v[j];
            }
        }
        let norm = math::sqrt(w.iter().map(|x| x * x).sum());
        if norm == 0.0 {
            return None;
        }
        for x in w.iter_mut() {
            *x /= norm;
        }
        v = w;
    }
    let mut worst = 0.0f64;
    for p in points {
        let dot: f64 = (0..d).map(|i| (p[i] - mean[i]) * v[i]).sum();
        worst = worst.max(dot.abs());
    }
    Some(worst)
}

/// Max deviation `| |p − center| − radius |` for the algebraic best-fit
/// sphere (linear least squares in center and radius).
fn sphere_fit_residual(points: &[Vec<f64>]) -> Option<f64> {
    let n = points.len();
    if n < 4 {
        return None;
    }
    let d = points[0].len();
    let m = d + 1;
    // Normal equations for minimising Σ (|p|² + b·p + c)².
    let mut ata = vec![0.0; m * m];
    let mut atb = vec![0.0; m];
    for p in points {
        let norm2: f64 = p.iter().map(|x| x * x).sum();
        let mut row = Vec::with_capacity(m);
        row.extend_from_slice(p);
        row.push(1.0);
        for i in 0..m {
            for j in 0..m {
                ata[i * m + j] += row[i] * row[j];
            }
            atb[i] -= row[i] * norm2;
        }
    }
    let sol = solve_dense(&mut ata, &mut atb, m)?;
    let center: Vec<f64> = sol[..d].iter().map(|&b| -b / 2.0).collect();
    let r2: f64 = center.iter().map(|x| x * x).sum::<f64>() - sol[d];
    if !(r2 > 0.0) {
        return None;
    }
    let radius = math::sqrt(r2);
    let mut worst = 0.0f64;
    for p in points {
        let dist = math::sqrt(
            (0..d)
                .map(|i| (p[i] - center[i]) * (p[i] - center[i]))
                .sum(),
        );
        worst = worst.max((dist - radius).abs());
    }
    Some(worst)
}

/// Gaussian elimination with partial pivoting; `None` on (near) singularity.
fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row * n + col].abs() > a[pivot * n + col].abs() {
                pivot = row;
            }
        }
        if a[pivot * n + col].abs() < 1e-12 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row * n + k] * x[k];
        }
        x[row] = acc / a[row * n + row];
    }
    Some(x)
}

#[cfg(test)]
mod tests;
