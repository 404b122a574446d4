//! Cavity geometry, standing-wave frequencies and the Bogoliubov overlaps
//! between the modes of the undivided cavity and the modes of its two halves.
//!
//! Mode numbers (`n` for the half-cavity modes, `l` for the full-cavity
//! modes) are 1-based throughout, as in the physics.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, Matrix2};
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::sci17;

/// Half of the divided cavity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `0 < x < r`, modes `u_n`.
    Left,
    /// `r < x < R`, modes `ū_n`.
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];
}

/// A Dirichlet cavity of length `R` with a mirror inserted at `r = (p/q)·R`.
///
/// The mirror position is kept as an exact reduced fraction so that the
/// resonance condition between full-cavity and half-cavity modes is decided
/// in integer arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityGeometry {
    length: f64,
    num: u64,
    den: u64,
}

impl CavityGeometry {
    pub fn new(length: f64, num: u64, den: u64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Domain(format!(
                "cavity length must be positive and finite, got {length}"
            )));
        }
        if num == 0 || den == 0 || num >= den {
            return Err(Error::Domain(format!(
                "mirror fraction must satisfy 0 < p/q < 1, got {num}/{den}"
            )));
        }
        let g = num.gcd(&den);
        Ok(Self {
            length,
            num: num / g,
            den: den / g,
        })
    }

    /// Mirror in the middle of the cavity.
    pub fn midpoint(length: f64) -> Result<Self> {
        Self::new(length, 1, 2)
    }

    /// Cavity length `R`.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Reduced mirror fraction `(p, q)`.
    pub fn mirror_fraction(&self) -> (u64, u64) {
        (self.num, self.den)
    }

    pub fn is_midpoint(&self) -> bool {
        self.num == 1 && self.den == 2
    }

    /// Mirror position `r`.
    pub fn mirror_position(&self) -> f64 {
        self.length * self.num as f64 / self.den as f64
    }

    /// Length of one half: `r` on the left, `r̄ = R − r` on the right.
    pub fn side_length(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.mirror_position(),
            Side::Right => self.length - self.mirror_position(),
        }
    }

    /// Full-cavity frequency `Ω_l = πl/R`.
    pub fn input_frequency(&self, l: usize) -> Result<f64> {
        if l == 0 {
            return Err(Error::Domain("input mode number must be >= 1".into()));
        }
        Ok(PI * l as f64 / self.length)
    }

    /// Half-cavity frequency `ω_n = πn/r` (left) or `ω̄_n = πn/r̄` (right).
    pub fn side_frequency(&self, side: Side, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain("output mode number must be >= 1".into()));
        }
        Ok(PI * n as f64 / self.side_length(side))
    }

    /// Whether `Ω_l` coincides with the half-cavity frequency of mode `n`.
    ///
    /// Left: `l·p = n·q`. Right: `l·(q − p) = n·q`.
    pub fn is_resonant(&self, side: Side, n: usize, l: usize) -> bool {
        let (p, q) = (self.num as u128, self.den as u128);
        let (n, l) = (n as u128, l as u128);
        match side {
            Side::Left => l * p == n * q,
            Side::Right => l * (q - p) == n * q,
        }
    }

    /// `sin(lπr/R)` evaluated on the reduced fraction, exact at the zeros.
    fn mirror_phase_sine(&self, l: usize) -> f64 {
        let q = self.den as u128;
        let m = (l as u128 * self.num as u128) % (2 * q);
        let (m, sign) = if m >= q { (m - q, -1.0) } else { (m, 1.0) };
        if m == 0 {
            return 0.0;
        }
        let m = if 2 * m > q { q - m } else { m };
        sign * (PI * m as f64 / q as f64).sin()
    }

    /// Overlap factor `V_nl` (left) or `V̄_nl` (right).
    ///
    /// The resonant branch is selected by [`Self::is_resonant`]; on the right
    /// side it carries the sign `(−1)^{n+l}`.
    pub fn v_coeff(&self, side: Side, n: usize, l: usize) -> Result<f64> {
        let big_omega = self.input_frequency(l)?;
        let omega = self.side_frequency(side, n)?;
        let len = self.side_length(side);
        let norm = (self.length * len * big_omega * omega).sqrt();

        if self.is_resonant(side, n, l) {
            let v = len / (2.0 * norm);
            return Ok(match side {
                Side::Left => v,
                Side::Right if (n + l) % 2 == 1 => -v,
                Side::Right => v,
            });
        }

        let numer = n as f64 * PI * self.mirror_phase_sine(l);
        let denom = len * norm * (big_omega * big_omega - omega * omega);
        Ok(match side {
            Side::Left if n % 2 == 1 => -numer / denom,
            Side::Left => numer / denom,
            Side::Right => -numer / denom,
        })
    }

    /// Bogoliubov coefficients `(α_nl, β_nl) = ((Ω_l + ω_n)V_nl, (Ω_l − ω_n)V_nl)`.
    pub fn alpha_beta(&self, side: Side, n: usize, l: usize) -> Result<(f64, f64)> {
        let v = self.v_coeff(side, n, l)?;
        let big_omega = self.input_frequency(l)?;
        let omega = self.side_frequency(side, n)?;
        Ok(((big_omega + omega) * v, (big_omega - omega) * v))
    }

    /// Quadrature block `2V·diag(ω_n, Ω_l)` coupling input mode `l` to
    /// output mode `n`.
    pub fn s_block(&self, side: Side, n: usize, l: usize) -> Result<Matrix2<f64>> {
        let v = self.v_coeff(side, n, l)?;
        let big_omega = self.input_frequency(l)?;
        let omega = self.side_frequency(side, n)?;
        Ok(Matrix2::new(2.0 * v * omega, 0.0, 0.0, 2.0 * v * big_omega))
    }
}

/// UV cutoff `Λ`: `2Λ` full-cavity modes are kept, `Λ` modes on each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruncationConfig {
    cutoff: usize,
}

impl TruncationConfig {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::Domain("cutoff must be >= 1".into()));
        }
        Ok(Self { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn input_modes(&self) -> usize {
        2 * self.cutoff
    }

    /// Output modes on each side of the mirror.
    pub fn modes_per_side(&self) -> usize {
        self.cutoff
    }

    /// 1-based position of half-cavity mode `n` in the output mode list
    /// `u_1 … u_Λ, ū_1 … ū_Λ`.
    pub fn output_mode(&self, side: Side, n: usize) -> Result<usize> {
        if n == 0 || n > self.cutoff {
            return Err(Error::IndexOutOfRange {
                index: n,
                n_modes: self.cutoff,
            });
        }
        Ok(match side {
            Side::Left => n,
            Side::Right => self.cutoff + n,
        })
    }
}

/// The symplectic form `⊕ [[0, 1], [−1, 0]]` on `n_modes` interleaved modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for m in 0..n_modes {
        j[(2 * m, 2 * m + 1)] = 1.0;
        j[(2 * m + 1, 2 * m)] = -1.0;
    }
    j
}

/// Truncated quadrature transform `x_out = S·x_in` of the mirror insertion.
///
/// Rows hold `u_1 … u_Λ` then `ū_1 … ū_Λ`; columns hold `U_1 … U_{2Λ}`;
/// every mode contributes a `(Q, P)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    geometry: CavityGeometry,
    truncation: TruncationConfig,
    matrix: DMatrix<f64>,
}

impl SymplecticTransform {
    pub fn build(geometry: &CavityGeometry, truncation: TruncationConfig) -> Result<Self> {
        let cutoff = truncation.cutoff();
        let dim = 4 * cutoff;
        let mut matrix = DMatrix::zeros(dim, dim);
        for side in Side::BOTH {
            for n in 1..=cutoff {
                let row = 2 * (truncation.output_mode(side, n)? - 1);
                for l in 1..=truncation.input_modes() {
                    let block = geometry.s_block(side, n, l)?;
                    let col = 2 * (l - 1);
                    matrix[(row, col)] = block[(0, 0)];
                    matrix[(row + 1, col + 1)] = block[(1, 1)];
                }
            }
        }
        Ok(Self {
            geometry: *geometry,
            truncation,
            matrix,
        })
    }

    pub fn geometry(&self) -> &CavityGeometry {
        &self.geometry
    }

    pub fn truncation(&self) -> TruncationConfig {
        self.truncation
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Number of modes on either side of the map (`2Λ`).
    pub fn n_modes(&self) -> usize {
        self.truncation.input_modes()
    }

    /// 2×2 block coupling input mode `l` to output mode `n` on `side`.
    pub fn block(&self, side: Side, n: usize, l: usize) -> Result<Matrix2<f64>> {
        let row = 2 * (self.truncation.output_mode(side, n)? - 1);
        if l == 0 || l > self.n_modes() {
            return Err(Error::IndexOutOfRange {
                index: l,
                n_modes: self.n_modes(),
            });
        }
        let col = 2 * (l - 1);
        Ok(self.matrix.fixed_view::<2, 2>(row, col).into_owned())
    }

    /// Largest entry of `S·J·Sᵀ − J` restricted to the rows and columns of
    /// the given 1-based output modes.
    pub fn symplectic_defect(&self, output_modes: &[usize]) -> Result<f64> {
        let n = self.n_modes();
        let mut rows = Vec::with_capacity(2 * output_modes.len());
        for &m in output_modes {
            if m == 0 || m > n {
                return Err(Error::IndexOutOfRange { index: m, n_modes: n });
            }
            rows.push(2 * (m - 1));
            rows.push(2 * (m - 1) + 1);
        }
        let sub = self.matrix.select_rows(rows.iter());
        let form = symplectic_form(n);
        let image = &sub * &form * sub.transpose();
        let target = symplectic_form(output_modes.len());
        Ok((image - target).amax())
    }

    /// Row-major CSV dump, 17 significant digits, no header.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.matrix.nrows() {
            let row: Vec<String> = (0..self.matrix.ncols())
                .map(|j| sci17(self.matrix[(i, j)]))
                .collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}
