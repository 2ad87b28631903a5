//! Contraction maps and their compositions.
//!
//! Two families are supported: similarities in any ambient dimension, and
//! one-dimensional Möbius maps `x ↦ (ax+b)/(cx+d)`. Möbius maps are closed
//! under composition and carry exact derivatives, so every smooth branch the
//! gallery needs (affine branches, parabolic branches, reciprocal branches,
//! and all their compositions) has exact hulls and derivative bounds from
//! endpoint evaluation.

use alloc::vec;
use alloc::vec::Vec;

use super::GeometryError;

/// A 1D Möbius map `x ↦ (ax + b)/(cx + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mobius {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mobius { a, b, c, d }
    }

    /// The affine map `x ↦ scale·x + offset`.
    pub fn affine(scale: f64, offset: f64) -> Self {
        Mobius {
            a: scale,
            b: offset,
            c: 0.0,
            d: 1.0,
        }
    }

    pub fn identity() -> Self {
        Mobius::affine(1.0, 0.0)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.a * x + self.b) / (self.c * x + self.d)
    }

    /// Signed derivative `(ad − bc)/(cx + d)²`.
    #[inline]
    pub fn deriv(&self, x: f64) -> f64 {
        let den = self.c * x + self.d;
        (self.a * self.d - self.b * self.c) / (den * den)
    }

    /// Composition `self ∘ other` (matrix product).
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    /// Rescale coefficients so the largest magnitude is 1; deep compositions
    /// stay in floating-point range without changing the map.
    pub fn normalize(&self) -> Mobius {
        let m = self
            .a
            .abs()
            .max(self.b.abs())
            .max(self.c.abs())
            .max(self.d.abs());
        if m == 0.0 || !m.is_finite() {
            return *self;
        }
        Mobius {
            a: self.a / m,
            b: self.b / m,
            c: self.c / m,
            d: self.d / m,
        }
    }

    pub fn inverse(&self) -> Mobius {
        Mobius {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Pole location `−d/c`, if any.
    pub fn pole(&self) -> Option<f64> {
        if self.c == 0.0 {
            None
        } else {
            Some(-self.d / self.c)
        }
    }

    /// True when the pole lies outside `[lo − margin, hi + margin]`, so the
    /// map is continuous and strictly monotone on `[lo, hi]`.
    pub fn regular_on(&self, lo: f64, hi: f64) -> bool {
        match self.pole() {
            None => self.a != 0.0,
            Some(p) => {
                let margin = 1e-9 * (1.0 + hi.abs().max(lo.abs()));
                p < lo - margin || p > hi + margin
            }
        }
    }

    /// Image interval of `[lo, hi]` (requires regularity there).
    pub fn image(&self, lo: f64, hi: f64) -> (f64, f64) {
        let p = self.eval(lo);
        let q = self.eval(hi);
        if p <= q {
            (p, q)
        } else {
            (q, p)
        }
    }

    /// Range of `|φ′|` on `[lo, hi]`: the derivative magnitude is monotone on
    /// a pole-free interval, so the endpoints realise the extremes.
    pub fn deriv_range(&self, lo: f64, hi: f64) -> (f64, f64) {
        let p = self.deriv(lo).abs();
        let q = self.deriv(hi).abs();
        if p <= q {
            (p, q)
        } else {
            (q, p)
        }
    }

    /// Distortion data `(L, α)` with `α = 1`: a Lipschitz bound for
    /// `| |φ′(y)|/|φ′(x)| − 1 |` on `[lo, hi]`.
    pub fn holder_data(&self, lo: f64, hi: f64) -> (f64, f64) {
        if self.c == 0.0 {
            return (0.0, 1.0);
        }
        let den_lo = (self.c * lo + self.d).abs();
        let den_hi = (self.c * hi + self.d).abs();
        let den_min = den_lo.min(den_hi);
        let den_max = den_lo.max(den_hi);
        (2.0 * self.c.abs() * den_max / (den_min * den_min), 1.0)
    }
}

/// A member of a contraction family.
#[derive(Debug, Clone, PartialEq)]
pub enum ContractionMap {
    /// `x ↦ ratio·L·x + translation` with `L` an isometry (identity when
    /// omitted); any ambient dimension.
    Similarity {
        ratio: f64,
        /// Row-major `d × d` orthogonal matrix; `None` means identity.
        linear: Option<Vec<f64>>,
        translation: Vec<f64>,
    },
    /// One-dimensional Möbius branch.
    Mobius1d(Mobius),
}

impl ContractionMap {
    /// 1D similarity `x ↦ ±ratio·x + translation`.
    pub fn similarity_1d(ratio: f64, orientation_preserving: bool, translation: f64) -> Self {
        ContractionMap::Similarity {
            ratio,
            linear: if orientation_preserving {
                None
            } else {
                Some(vec![-1.0])
            },
            translation: vec![translation],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ContractionMap::Similarity { translation, .. } => translation.len(),
            ContractionMap::Mobius1d(_) => 1,
        }
    }

    /// Validate the map on a seed box and return its `|φ′|` range there.
    pub(super) fn validate(
        &self,
        seed: &[(f64, f64)],
        index: usize,
        allow_unit_derivative: bool,
    ) -> Result<(f64, f64), GeometryError> {
        match self {
            ContractionMap::Similarity {
                ratio,
                linear,
                translation,
            } => {
                if !(*ratio > 0.0 && *ratio < 1.0) {
                    return Err(GeometryError::InvalidMap {
                        index,
                        reason: "similarity ratio must lie in (0,1)",
                    });
                }
                let d = translation.len();
                if d != seed.len() {
                    return Err(GeometryError::InvalidMap {
                        index,
                        reason: "translation dimension does not match the seed",
                    });
                }
                if let Some(l) = linear {
                    if l.len() != d * d {
                        return Err(GeometryError::InvalidMap {
                            index,
                            reason: "linear part must be d x d",
                        });
                    }
                    // Orthogonality check: LᵀL = I.
                    for i in 0..d {
                        for j in 0..d {
                            let mut acc = 0.0;
                            for k in 0..d {
                                acc += l[k * d + i] * l[k * d + j];
                            }
                            let expect = if i == j { 1.0 } else { 0.0 };
                            if (acc - expect).abs() > 1e-9 {
                                return Err(GeometryError::InvalidMap {
                                    index,
                                    reason: "linear part is not an isometry",
                                });
                            }
                        }
                    }
                }
                Ok((*ratio, *ratio))
            }
            ContractionMap::Mobius1d(m) => {
                if seed.len() != 1 {
                    return Err(GeometryError::InvalidMap {
                        index,
                        reason: "Möbius maps require a 1D seed",
                    });
                }
                let (lo, hi) = seed[0];
                if !m.regular_on(lo, hi) {
                    return Err(GeometryError::InvalidMap {
                        index,
                        reason: "Möbius pole meets the seed interval",
                    });
                }
                let (dlo, dhi) = m.deriv_range(lo, hi);
                let cap = if allow_unit_derivative { 1.0 } else { 1.0 - 1e-12 };
                if dhi > cap || dlo <= 0.0 {
                    return Err(GeometryError::InvalidMap {
                        index,
                        reason: "derivative range not within a contraction",
                    });
                }
                Ok((dlo, dhi))
            }
        }
    }
}

/// A composed map along a word, with the data needed for hulls, diameters,
/// and derivative evaluation maintained incrementally.
#[derive(Debug, Clone)]
pub(super) enum Composed {
    /// `x ↦ scale·L·x + t`, with `L` orthogonal (`None` = identity).
    Affine {
        scale: f64,
        linear: Option<Vec<f64>>,
        translation: Vec<f64>,
        dim: usize,
    },
    Mobius(Mobius),
}

impl Composed {
    pub fn identity(dim: usize, mobius: bool) -> Composed {
        if mobius {
            Composed::Mobius(Mobius::identity())
        } else {
            Composed::Affine {
                scale: 1.0,
                linear: None,
                translation: vec![0.0; dim],
                dim,
            }
        }
    }

    /// `self ∘ map` (append `map` on the inside, as when extending a word on
    /// the right).
    pub fn then_inner(&self, map: &ContractionMap) -> Composed {
        match (self, map) {
            (
                Composed::Affine {
                    scale,
                    linear,
                    translation,
                    dim,
                },
                ContractionMap::Similarity {
                    ratio,
                    linear: ml,
                    translation: mt,
                },
            ) => {
                let d = *dim;
                // New map: x ↦ s·L(r·M x + mt) + t = (s r)(L M) x + (s L mt + t).
                let apply_l = |v: &[f64]| -> Vec<f64> {
                    match linear {
                        None => v.to_vec(),
                        Some(l) => {
                            let mut out = vec![0.0; d];
                            for i in 0..d {
                                for j in 0..d {
                                    out[i] += l[i * d + j] * v[j];
                                }
                            }
                            out
                        }
                    }
                };
                let new_linear = match (linear, ml) {
                    (None, None) => None,
                    (Some(l), None) => Some(l.clone()),
                    (None, Some(m)) => Some(m.clone()),
                    (Some(l), Some(m)) => {
                        let mut out = vec![0.0; d * d];
                        for i in 0..d {
                            for j in 0..d {
                                for k in 0..d {
                                    out[i * d + j] += l[i * d + k] * m[k * d + j];
                                }
                            }
                        }
                        Some(out)
                    }
                };
                let lt = apply_l(mt);
                let new_translation: Vec<f64> = (0..d)
                    .map(|i| scale * lt[i] + translation[i])
                    .collect();
                Composed::Affine {
                    scale: scale * ratio,
                    linear: new_linear,
                    translation: new_translation,
                    dim: d,
                }
            }
            (Composed::Mobius(m0), ContractionMap::Mobius1d(m1)) => {
                Composed::Mobius(m0.compose(m1).normalize())
            }
            (Composed::Mobius(m0), ContractionMap::Similarity { ratio, linear, translation }) => {
                let sign = match linear {
                    Some(l) if l[0] < 0.0 => -1.0,
                    _ => 1.0,
                };
                let aff = Mobius::affine(sign * ratio, translation[0]);
                Composed::Mobius(m0.compose(&aff).normalize())
            }
            (Composed::Affine { .. }, ContractionMap::Mobius1d(_)) => {
                unreachable!("mixed families are promoted to Möbius at construction")
            }
        }
    }

    /// Axis-aligned hull of the image of `box_`: exact for affine images of
    /// boxes, exact interval for Möbius on a pole-free interval.
    pub fn hull(&self, box_: &[(f64, f64)]) -> Vec<(f64, f64)> {
        match self {
            Composed::Affine {
                scale,
                linear,
                translation,
                dim,
            } => {
                let d = *dim;
                match linear {
                    None => (0..d)
                        .map(|i| {
                            let (lo, hi) = box_[i];
                            (scale * lo + translation[i], scale * hi + translation[i])
                        })
                        .collect(),
                    Some(l) => {
                        // Row-wise interval arithmetic over M = scale·L.
                        (0..d)
                            .map(|i| {
                                let mut lo = translation[i];
                                let mut hi = translation[i];
                                for j in 0..d {
                                    let m = scale * l[i * d + j];
                                    let (a, b) = box_[j];
                                    if m >= 0.0 {
                                        lo += m * a;
                                        hi += m * b;
                                    } else {
                                        lo += m * b;
                                        hi += m * a;
                                    }
                                }
                                (lo, hi)
                            })
                            .collect()
                    }
                }
            }
            Composed::Mobius(m) => {
                let (lo, hi) = box_[0];
                let (a, b) = m.image(lo, hi);
                vec![(a, b)]
            }
        }
    }

    /// Contraction factor of the composition on `box_`: for similarities the
    /// exact ratio product; for Möbius the exact image-width ratio.
    pub fn diameter_factor(&self, box_: &[(f64, f64)]) -> f64 {
        match self {
            Composed::Affine { scale, .. } => *scale,
            Composed::Mobius(m) => {
                let (lo, hi) = box_[0];
                let (a, b) = m.image(lo, hi);
                (b - a) / (hi - lo)
            }
        }
    }
}
