//! Gaussian states in the quadrature picture.
//!
//! A state of `N` modes is a vector of first moments `(⟨Q_1⟩, ⟨P_1⟩, …)` and a
//! `2N × 2N` covariance matrix of symmetrised second moments, normalised so
//! that the vacuum has covariance equal to the identity. Mode indices are
//! 1-based.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::fmt::sci17;
use crate::modes::{symplectic_form, SymplecticTransform};

/// Slack on the uncertainty relation `ν ≥ 1` used by [`GaussianState::validate`].
pub const PHYSICALITY_SLACK: f64 = 1e-9;

/// Symplectic eigenvalues within this distance below 1 count as separable.
const SEPARABLE_SLACK: f64 = 1e-12;

/// Relative tolerance on a negative discriminant in the negativity formula.
const DISCRIMINANT_SLACK: f64 = 1e-9;

/// Base of the logarithm in the logarithmic negativity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "e")]
    E,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "10")]
    Ten,
}

impl LogBase {
    /// Natural logarithm of the base.
    pub fn ln(self) -> f64 {
        match self {
            LogBase::E => 1.0,
            LogBase::Two => std::f64::consts::LN_2,
            LogBase::Ten => std::f64::consts::LN_10,
        }
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" | "ln" => Ok(LogBase::E),
            "2" => Ok(LogBase::Two),
            "10" => Ok(LogBase::Ten),
            other => Err(Error::Domain(format!(
                "log base must be one of e, 2, 10; got {other:?}"
            ))),
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::E => "e",
            LogBase::Two => "2",
            LogBase::Ten => "10",
        })
    }
}

/// Two distinct 1-based mode indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModePair {
    a: usize,
    b: usize,
}

impl ModePair {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::Domain("mode indices are 1-based".into()));
        }
        if a == b {
            return Err(Error::Domain(format!("mode pair must be distinct, got ({a}, {b})")));
        }
        Ok(Self { a, b })
    }

    pub fn first(&self) -> usize {
        self.a
    }

    pub fn second(&self) -> usize {
        self.b
    }
}

/// Single-mode squeezed thermal covariance with mean thermal occupation
/// `nbar`, squeezing `s` and squeezing angle `theta`.
pub fn squeezed_thermal_cov(nbar: f64, s: f64, theta: f64) -> Matrix2<f64> {
    let (ch, sh) = ((2.0 * s).cosh(), (2.0 * s).sinh());
    let (c2, s2) = ((2.0 * theta).cos(), (2.0 * theta).sin());
    (2.0 * nbar + 1.0) * Matrix2::new(ch - c2 * sh, s2 * sh, s2 * sh, ch + c2 * sh)
}

/// Two-mode squeezed vacuum covariance `[[cosh2s·I, C], [Cᵀ, cosh2s·I]]` with
/// `C = −|sinh2s|·[[cosθ, sinθ], [sinθ, −cosθ]]`.
pub fn two_mode_squeezed_cov(s: f64, theta: f64) -> Matrix4<f64> {
    let ch = (2.0 * s).cosh();
    let sh = (2.0 * s).sinh().abs();
    let (c, sn) = (theta.cos(), theta.sin());
    let corr = -sh * Matrix2::new(c, sn, sn, -c);
    let mut m = Matrix4::identity() * ch;
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&corr);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&corr.transpose());
    m
}

/// Logarithmic negativity of a two-mode covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Negativity {
    pub value: f64,
    /// Smallest symplectic eigenvalue of the partially transposed state.
    pub nu_min: f64,
    /// Set when numerical noise forced a clamp: a slightly negative
    /// discriminant, or `ν̃` just below 1.
    pub clamped: bool,
}

/// Logarithmic negativity `max(0, −log ν̃)` of a two-mode covariance matrix,
/// with `ν̃² = (Δ̃ − sqrt(Δ̃² − 4 det σ)) / 2` and
/// `Δ̃ = det A + det B − 2 det C` for `σ = [[A, C], [Cᵀ, B]]`.
pub fn log_negativity_of(cov: &Matrix4<f64>, base: LogBase) -> Result<Negativity> {
    if cov.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidState("non-finite covariance entry".into()));
    }
    let a = cov.fixed_view::<2, 2>(0, 0).determinant();
    let b = cov.fixed_view::<2, 2>(2, 2).determinant();
    let c = cov.fixed_view::<2, 2>(0, 2).determinant();
    let delta = a + b - 2.0 * c;
    let det = cov.determinant();

    let mut clamped = false;
    let mut disc = delta * delta - 4.0 * det;
    if disc < 0.0 {
        if disc < -DISCRIMINANT_SLACK * delta.abs().max(1.0).powi(2) {
            return Err(Error::InvalidState(format!(
                "negative discriminant {disc:e} in partial-transpose spectrum"
            )));
        }
        clamped = true;
        disc = 0.0;
    }
    let nu_sq = 0.5 * (delta - disc.sqrt());
    if nu_sq <= 0.0 {
        return Err(Error::InvalidState(format!(
            "partial-transpose symplectic eigenvalue squared is {nu_sq:e}"
        )));
    }
    let nu_min = nu_sq.sqrt();
    let value = if nu_min >= 1.0 {
        0.0
    } else if nu_min >= 1.0 - SEPARABLE_SLACK {
        clamped = true;
        0.0
    } else {
        -nu_min.ln() / base.ln()
    };
    if clamped {
        log::debug!("negativity clamped at nu_min = {nu_min}");
    }
    Ok(Negativity {
        value,
        nu_min,
        clamped,
    })
}

/// Symplectic spectrum of a covariance matrix, ascending.
///
/// Positive-definite input goes through the Cholesky factor `σ = LLᵀ`: the
/// antisymmetric matrix `LᵀJL` has eigenvalues `±iν`, so `ν²` are the doubly
/// degenerate eigenvalues of `(LᵀJL)(LᵀJL)ᵀ`. Anything else falls back to the
/// general eigenvalues of `Jσ`.
pub fn symplectic_spectrum(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = cov.nrows();
    if dim == 0 || !dim.is_multiple_of(2) || cov.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: 2 * (dim / 2).max(1),
            found: dim,
        });
    }
    if cov.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidState("non-finite covariance entry".into()));
    }
    let n_modes = dim / 2;
    let form = symplectic_form(n_modes);
    let symmetric = 0.5 * (cov + cov.transpose());

    let mut doubled: Vec<f64> = match symmetric.clone().cholesky() {
        Some(chol) => {
            let l = chol.l();
            let k = l.transpose() * &form * &l;
            let kk = &k * k.transpose();
            kk.symmetric_eigenvalues()
                .iter()
                .map(|x| x.max(0.0).sqrt())
                .collect()
        }
        None => (&form * &symmetric)
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .collect(),
    };
    doubled.sort_by(|a, b| a.total_cmp(b));
    Ok(doubled.into_iter().step_by(2).collect())
}

/// Outcome of [`GaussianState::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// `max |σ − σᵀ|`.
    pub asymmetry: f64,
    /// Smallest ordinary eigenvalue of the symmetrised covariance; the
    /// uncertainty relation needs it positive.
    pub min_eigenvalue: f64,
    pub min_symplectic_eigenvalue: f64,
    /// `max(0, 1 − ν_min)`.
    pub deficit: f64,
    pub ok: bool,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: min symplectic eigenvalue {:.12e}, deficit {:.3e}, asymmetry {:.3e}",
            if self.ok { "ok" } else { "violation" },
            self.min_symplectic_eigenvalue,
            self.deficit,
            self.asymmetry
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    first_moments: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::Domain("a state needs at least one mode".into()));
        }
        Ok(Self {
            first_moments: DVector::zeros(2 * n_modes),
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes),
        })
    }

    pub fn from_parts(first_moments: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = first_moments.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: 2 * (dim / 2).max(1),
                found: dim,
            });
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: cov.nrows().max(cov.ncols()),
            });
        }
        if first_moments.iter().chain(cov.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        Ok(Self { first_moments, cov })
    }

    pub fn n_modes(&self) -> usize {
        self.first_moments.len() / 2
    }

    pub fn first_moments(&self) -> &DVector<f64> {
        &self.first_moments
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    fn offset(&self, mode: usize) -> Result<usize> {
        if mode == 0 || mode > self.n_modes() {
            return Err(Error::IndexOutOfRange {
                index: mode,
                n_modes: self.n_modes(),
            });
        }
        Ok(2 * (mode - 1))
    }

    /// 2×2 covariance block between modes `i` and `j`.
    pub fn block(&self, i: usize, j: usize) -> Result<Matrix2<f64>> {
        let (oi, oj) = (self.offset(i)?, self.offset(j)?);
        Ok(self.cov.fixed_view::<2, 2>(oi, oj).into_owned())
    }

    /// `(⟨Q⟩, ⟨P⟩)` of a mode.
    pub fn means(&self, mode: usize) -> Result<(f64, f64)> {
        let o = self.offset(mode)?;
        Ok((self.first_moments[o], self.first_moments[o + 1]))
    }

    /// Zeroes every correlation between `mode` and the other modes.
    fn decouple(&mut self, mode: usize) -> Result<()> {
        let o = self.offset(mode)?;
        let dim = self.cov.nrows();
        for idx in 0..dim {
            if idx == o || idx == o + 1 {
                continue;
            }
            for r in [o, o + 1] {
                self.cov[(r, idx)] = 0.0;
                self.cov[(idx, r)] = 0.0;
            }
        }
        Ok(())
    }

    /// Displaces mode `k` to `(ρ cos φ, ρ sin φ)`; the covariance is untouched.
    pub fn set_coherent(&self, k: usize, rho: f64, phi: f64) -> Result<Self> {
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::Domain(format!("coherent amplitude must be >= 0, got {rho}")));
        }
        let o = self.offset(k)?;
        let mut out = self.clone();
        out.first_moments[o] = rho * phi.cos();
        out.first_moments[o + 1] = rho * phi.sin();
        Ok(out)
    }

    /// Replaces mode `k` with an uncorrelated squeezed thermal state.
    pub fn set_squeezed_thermal(&self, k: usize, nbar: f64, s: f64, theta: f64) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::Domain(format!("thermal occupation must be >= 0, got {nbar}")));
        }
        let o = self.offset(k)?;
        let mut out = self.clone();
        out.decouple(k)?;
        out.cov
            .fixed_view_mut::<2, 2>(o, o)
            .copy_from(&squeezed_thermal_cov(nbar, s, theta));
        out.first_moments[o] = 0.0;
        out.first_moments[o + 1] = 0.0;
        Ok(out)
    }

    /// Replaces modes `k < k2` with a two-mode squeezed vacuum.
    pub fn set_two_mode_squeezed(&self, k: usize, k2: usize, s: f64, theta: f64) -> Result<Self> {
        if k >= k2 {
            return Err(Error::Domain(format!("two-mode squeezing needs k < k', got ({k}, {k2})")));
        }
        let (o1, o2) = (self.offset(k)?, self.offset(k2)?);
        let tms = two_mode_squeezed_cov(s, theta);
        let mut out = self.clone();
        out.decouple(k)?;
        out.decouple(k2)?;
        let offsets = [o1, o2];
        for (bi, &oi) in offsets.iter().enumerate() {
            for (bj, &oj) in offsets.iter().enumerate() {
                out.cov
                    .fixed_view_mut::<2, 2>(oi, oj)
                    .copy_from(&tms.fixed_view::<2, 2>(2 * bi, 2 * bj));
            }
            out.first_moments[oi] = 0.0;
            out.first_moments[oi + 1] = 0.0;
        }
        Ok(out)
    }

    /// Product of the two marginals: zeroes the blocks between `k` and `k2`.
    pub fn strip_correlations(&self, k: usize, k2: usize) -> Result<Self> {
        let (o1, o2) = (self.offset(k)?, self.offset(k2)?);
        let mut out = self.clone();
        if o1 != o2 {
            out.cov.fixed_view_mut::<2, 2>(o1, o2).fill(0.0);
            out.cov.fixed_view_mut::<2, 2>(o2, o1).fill(0.0);
        }
        Ok(out)
    }

    /// `x ← S·x`, `σ ← S·σ·Sᵀ`.
    pub fn apply_transform(&self, transform: &SymplecticTransform) -> Result<Self> {
        let s = transform.matrix();
        if s.ncols() != self.first_moments.len() {
            return Err(Error::DimensionMismatch {
                expected: s.ncols() / 2,
                found: self.n_modes(),
            });
        }
        let first_moments = s * &self.first_moments;
        let cov = s * &self.cov * s.transpose();
        Ok(Self { first_moments, cov })
    }

    /// Marginal state of the listed modes, in the given order.
    pub fn reduce_modes(&self, modes: &[usize]) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::Domain("cannot reduce to zero modes".into()));
        }
        let mut idx = Vec::with_capacity(2 * modes.len());
        for &m in modes {
            let o = self.offset(m)?;
            idx.extend([o, o + 1]);
        }
        let dim = idx.len();
        let first_moments = DVector::from_fn(dim, |i, _| self.first_moments[idx[i]]);
        let cov = DMatrix::from_fn(dim, dim, |i, j| self.cov[(idx[i], idx[j])]);
        Ok(Self { first_moments, cov })
    }

    /// Two-mode marginal `[[σ_aa, γ_ab], [γ_abᵀ, σ_bb]]`.
    pub fn reduce(&self, pair: ModePair) -> Result<Self> {
        self.reduce_modes(&[pair.first(), pair.second()])
    }

    /// `¼(Tr σ_nn − 2) + ½(⟨q_n⟩² + ⟨p_n⟩²)`.
    pub fn mean_particle_number(&self, mode: usize) -> Result<f64> {
        let o = self.offset(mode)?;
        let trace = self.cov[(o, o)] + self.cov[(o + 1, o + 1)];
        let (q, p) = (self.first_moments[o], self.first_moments[o + 1]);
        Ok(0.25 * (trace - 2.0) + 0.5 * (q * q + p * p))
    }

    /// Logarithmic negativity of a two-mode state.
    pub fn log_negativity(&self, base: LogBase) -> Result<f64> {
        Ok(self.negativity(base)?.value)
    }

    pub fn negativity(&self, base: LogBase) -> Result<Negativity> {
        if self.n_modes() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.n_modes(),
            });
        }
        let cov = Matrix4::from_fn(|i, j| self.cov[(i, j)]);
        log_negativity_of(&cov, base)
    }

    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        symplectic_spectrum(&self.cov)
    }

    /// Symmetry and uncertainty-relation check with slack [`PHYSICALITY_SLACK`].
    pub fn validate(&self) -> ValidationReport {
        let asymmetry = (&self.cov - self.cov.transpose()).amax();
        let scale = self.cov.amax().max(1.0);
        let symmetric = 0.5 * (&self.cov + self.cov.transpose());
        let min_eigenvalue = symmetric.symmetric_eigenvalues().min();
        let nu_min = match self.symplectic_eigenvalues() {
            Ok(spectrum) => spectrum.first().copied().unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        };
        let deficit = if nu_min.is_nan() {
            f64::INFINITY
        } else {
            (1.0 - nu_min).max(0.0)
        };
        let ok = asymmetry <= PHYSICALITY_SLACK * scale
            && min_eigenvalue > 0.0
            && deficit <= PHYSICALITY_SLACK;
        ValidationReport {
            asymmetry,
            min_eigenvalue,
            min_symplectic_eigenvalue: nu_min,
            deficit,
            ok,
        }
    }

    /// `{"n_modes": N, "first_moments": [..], "cov": [..]}` with the
    /// covariance flattened row-major and every number printed with 17
    /// significant digits.
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Wire {
            n_modes: usize,
            first_moments: Vec<Box<RawValue>>,
            cov: Vec<Box<RawValue>>,
        }
        let raw = |x: f64| -> Result<Box<RawValue>> {
            if !x.is_finite() {
                return Err(Error::Serialization(format!("cannot encode {x}")));
            }
            RawValue::from_string(sci17(x)).map_err(|e| Error::Serialization(e.to_string()))
        };
        let dim = self.cov.nrows();
        let wire = Wire {
            n_modes: self.n_modes(),
            first_moments: self.first_moments.iter().map(|&x| raw(x)).collect::<Result<_>>()?,
            cov: (0..dim)
                .flat_map(|i| (0..dim).map(move |j| (i, j)))
                .map(|(i, j)| raw(self.cov[(i, j)]))
                .collect::<Result<_>>()?,
        };
        serde_json::to_string(&wire).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Wire {
            n_modes: usize,
            first_moments: Vec<f64>,
            cov: Vec<f64>,
        }
        let wire: Wire =
            serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        let dim = 2 * wire.n_modes;
        if wire.first_moments.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: wire.first_moments.len(),
            });
        }
        if wire.cov.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: wire.cov.len(),
            });
        }
        Self::from_parts(
            DVector::from_vec(wire.first_moments),
            DMatrix::from_row_slice(dim, dim, &wire.cov),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{CavityGeometry, Side, TruncationConfig};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn vacuum_is_identity() {
        let v = GaussianState::vacuum(1).unwrap();
        assert_eq!(v.first_moments().as_slice(), &[0.0, 0.0]);
        assert_eq!(v.cov(), &DMatrix::identity(2, 2));
        let v4 = GaussianState::vacuum(4).unwrap();
        assert_eq!(v4.cov(), &DMatrix::identity(8, 8));
        assert!(v4.validate().ok);
        assert!(GaussianState::vacuum(0).is_err());
    }

    #[test]
    fn coherent_displacement() {
        let v = GaussianState::vacuum(3).unwrap();
        let c = v.set_coherent(1, 1.0, 0.0).unwrap();
        assert_eq!(c.means(1).unwrap(), (1.0, 0.0));
        assert_eq!(c.cov(), v.cov());
        assert_eq!(v.set_coherent(2, 0.0, 1.3).unwrap(), v);
        let c = v.set_coherent(2, 1.7, 0.4).unwrap();
        assert_relative_eq!(c.mean_particle_number(2).unwrap(), 1.7 * 1.7 / 2.0, max_relative = 1e-15);
        assert!(matches!(
            v.set_coherent(4, 1.0, 0.0),
            Err(Error::IndexOutOfRange { index: 4, n_modes: 3 })
        ));
        assert!(v.set_coherent(0, 1.0, 0.0).is_err());
        assert!(v.set_coherent(1, -1.0, 0.0).is_err());
    }

    #[test]
    fn squeezed_thermal_blocks() {
        let v = GaussianState::vacuum(2).unwrap();
        assert_eq!(v.set_squeezed_thermal(1, 0.0, 0.0, 0.3).unwrap(), v);
        let t = v.set_squeezed_thermal(2, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(t.block(2, 2).unwrap(), Matrix2::identity() * 3.0);
        assert_relative_eq!(t.mean_particle_number(2).unwrap(), 1.0);
        let sq = v.set_squeezed_thermal(1, 0.0, 0.5, 0.0).unwrap();
        let b = sq.block(1, 1).unwrap();
        assert_relative_eq!(b[(0, 0)], (-1.0f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(b[(1, 1)], 1.0f64.exp(), max_relative = 1e-14);
        assert_eq!(b[(0, 1)], 0.0);
        assert!(v.set_squeezed_thermal(3, 0.0, 0.0, 0.0).is_err());
        assert!(v.set_squeezed_thermal(1, -0.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn two_mode_squeezed_blocks() {
        let v = GaussianState::vacuum(3).unwrap();
        assert_eq!(v.set_two_mode_squeezed(1, 2, 0.0, 0.7).unwrap(), v);

        let t = v.set_two_mode_squeezed(1, 2, 0.75, PI).unwrap();
        let (ch, sh) = (1.5f64.cosh(), 1.5f64.sinh());
        assert_relative_eq!(t.block(1, 1).unwrap(), Matrix2::identity() * ch);
        assert_relative_eq!(t.block(2, 2).unwrap(), Matrix2::identity() * ch);
        let expected = -sh * Matrix2::new(-1.0, 0.0, 0.0, 1.0);
        assert_relative_eq!(t.block(1, 2).unwrap(), expected, epsilon = 1e-14);
        assert_relative_eq!(t.block(2, 1).unwrap(), expected.transpose(), epsilon = 1e-14);

        let pair = t.reduce(ModePair::new(1, 2).unwrap()).unwrap();
        for nu in pair.symplectic_eigenvalues().unwrap() {
            assert_relative_eq!(nu, 1.0, epsilon = 1e-10);
        }
        assert!(v.set_two_mode_squeezed(2, 1, 0.5, 0.0).is_err());
        assert!(v.set_two_mode_squeezed(1, 4, 0.5, 0.0).is_err());
    }

    #[test]
    fn stripping_leaves_thermal_marginals() {
        let s = 0.6;
        let t = GaussianState::vacuum(2)
            .unwrap()
            .set_two_mode_squeezed(1, 2, s, 0.3)
            .unwrap();
        let stripped = t.strip_correlations(1, 2).unwrap();
        let ch = (2.0 * s).cosh();
        assert_relative_eq!(stripped.cov(), &(DMatrix::identity(4, 4) * ch), epsilon = 1e-15);
        assert!(stripped.validate().ok);
        let v = GaussianState::vacuum(2).unwrap();
        assert_eq!(v.strip_correlations(1, 2).unwrap(), v);
    }

    #[test]
    fn reduce_selects_entries() {
        let v = GaussianState::vacuum(4).unwrap();
        let r = v.reduce(ModePair::new(1, 3).unwrap()).unwrap();
        assert_eq!(r, GaussianState::vacuum(2).unwrap());

        let cov = DMatrix::from_fn(8, 8, |i, j| (i * 8 + j) as f64 + 0.25);
        let x = DVector::from_fn(8, |i, _| i as f64 - 3.5);
        let st = GaussianState::from_parts(x, cov.clone()).unwrap();
        let r = st.reduce(ModePair::new(3, 2).unwrap()).unwrap();
        let idx = [4, 5, 2, 3];
        for a in 0..4 {
            assert_eq!(r.first_moments()[a], st.first_moments()[idx[a]]);
            for b in 0..4 {
                assert_eq!(r.cov()[(a, b)].to_bits(), cov[(idx[a], idx[b])].to_bits());
            }
        }
        assert!(ModePair::new(2, 2).is_err());
        assert!(st.reduce(ModePair::new(1, 5).unwrap()).is_err());
    }

    #[test]
    fn particle_numbers() {
        let v = GaussianState::vacuum(2).unwrap();
        assert_eq!(v.mean_particle_number(1).unwrap(), 0.0);
        let t = v.set_squeezed_thermal(1, 2.5, 0.0, 0.0).unwrap();
        assert_relative_eq!(t.mean_particle_number(1).unwrap(), 2.5, max_relative = 1e-15);
        assert!(v.mean_particle_number(3).is_err());
    }

    #[test]
    fn negativity_of_standard_states() {
        let v = GaussianState::vacuum(2).unwrap();
        assert_eq!(v.log_negativity(LogBase::E).unwrap(), 0.0);
        for &s in &[0.1, 0.5, 0.75, 1.3] {
            for &theta in &[0.0, 0.4, PI] {
                let t = v.set_two_mode_squeezed(1, 2, s, theta).unwrap();
                assert_relative_eq!(t.log_negativity(LogBase::E).unwrap(), 2.0 * s, max_relative = 1e-10);
                assert_relative_eq!(
                    t.log_negativity(LogBase::Two).unwrap(),
                    2.0 * s / std::f64::consts::LN_2,
                    max_relative = 1e-10
                );
            }
        }
        let product = v
            .set_squeezed_thermal(1, 0.3, 0.8, 0.2)
            .unwrap()
            .set_squeezed_thermal(2, 0.0, 1.1, 1.0)
            .unwrap();
        assert_eq!(product.log_negativity(LogBase::E).unwrap(), 0.0);
        assert!(GaussianState::vacuum(3).unwrap().log_negativity(LogBase::E).is_err());
    }

    #[test]
    fn symplectic_spectra() {
        let v = GaussianState::vacuum(3).unwrap();
        for nu in v.symplectic_eigenvalues().unwrap() {
            assert_relative_eq!(nu, 1.0, epsilon = 1e-14);
        }
        let t = v.set_squeezed_thermal(2, 1.5, 0.0, 0.0).unwrap();
        let spec = t.symplectic_eigenvalues().unwrap();
        assert_eq!(spec.len(), 3);
        assert_relative_eq!(spec[2], 4.0, epsilon = 1e-12);
        assert_relative_eq!(spec[0], 1.0, epsilon = 1e-12);

        // Squeezing alone leaves the spectrum at 1.
        let sq = v.set_squeezed_thermal(1, 0.0, 1.2, 0.7).unwrap();
        for nu in sq.symplectic_eigenvalues().unwrap() {
            assert_relative_eq!(nu, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn validation_reports_violations() {
        let half = GaussianState::from_parts(DVector::zeros(2), DMatrix::identity(2, 2) * 0.5).unwrap();
        let report = half.validate();
        assert!(!report.ok);
        assert_relative_eq!(report.min_symplectic_eigenvalue, 0.5, epsilon = 1e-14);
        assert_relative_eq!(report.deficit, 0.5, epsilon = 1e-14);

        let mut cov = DMatrix::identity(4, 4);
        cov[(0, 3)] = 0.1;
        let skew = GaussianState::from_parts(DVector::zeros(4), cov).unwrap();
        assert!(!skew.validate().ok);

        // Indefinite covariance goes through the general eigen-solver.
        let mut cov = DMatrix::identity(2, 2);
        cov[(1, 1)] = -1.0;
        let bad = GaussianState::from_parts(DVector::zeros(2), cov).unwrap();
        assert!(!bad.validate().ok);
    }

    #[test]
    fn transform_dimension_checked() {
        let g = CavityGeometry::midpoint(2.0).unwrap();
        let t = SymplecticTransform::build(&g, TruncationConfig::new(2).unwrap()).unwrap();
        assert!(GaussianState::vacuum(3).unwrap().apply_transform(&t).is_err());
        let out = GaussianState::vacuum(4).unwrap().apply_transform(&t).unwrap();
        let sst = t.matrix() * t.matrix().transpose();
        assert_relative_eq!(out.cov(), &sst, epsilon = 1e-15);
        assert!(out.first_moments().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn midpoint_sides_carry_equal_particle_numbers() {
        let g = CavityGeometry::midpoint(2.0).unwrap();
        let trunc = TruncationConfig::new(16).unwrap();
        let t = SymplecticTransform::build(&g, trunc).unwrap();
        let input = GaussianState::vacuum(32)
            .unwrap()
            .set_squeezed_thermal(3, 0.4, 0.6, 0.9)
            .unwrap();
        let out = input.apply_transform(&t).unwrap();
        for n in 1..=16 {
            let left = out.mean_particle_number(trunc.output_mode(Side::Left, n).unwrap()).unwrap();
            let right = out.mean_particle_number(trunc.output_mode(Side::Right, n).unwrap()).unwrap();
            assert!((left - right).abs() <= 1e-12, "n={n}: {left} vs {right}");
        }
    }

    #[test]
    fn json_round_trip() {
        let st = GaussianState::vacuum(2)
            .unwrap()
            .set_two_mode_squeezed(1, 2, 0.3, 1.1)
            .unwrap()
            .set_coherent(1, 0.7, 2.0)
            .unwrap();
        let text = st.to_json().unwrap();
        assert!(text.starts_with("{\"n_modes\":2,"));
        assert_eq!(GaussianState::from_json(&text).unwrap(), st);
        assert!(GaussianState::from_json("{\"n_modes\":1,\"first_moments\":[0],\"cov\":[1,0,0,1]}").is_err());
        assert!(GaussianState::from_json("{\"n_modes\":1,\"first_moments\":[0,0],\"cov\":[1,0,0]}").is_err());
    }
}
