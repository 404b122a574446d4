//! Output covariance blocks for inputs that differ from the vacuum in one or
//! two full-cavity modes, evaluated term by term from the overlap
//! coefficients instead of through the dense `S·σ·Sᵀ` product.

use nalgebra::{Matrix2, Matrix4};

use crate::error::{Error, Result};
use crate::gaussian::squeezed_thermal_cov;
use crate::modes::{CavityGeometry, Side, TruncationConfig};

/// Which `2Λ × 2Λ` quadrant of the output covariance a block lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutputBlock {
    /// Left–left, `σ_ij`.
    Sigma,
    /// Left–right, `γ_ij`.
    Gamma,
    /// Right–right, `σ̄_ij`.
    SigmaBar,
}

impl OutputBlock {
    fn sides(self) -> (Side, Side) {
        match self {
            OutputBlock::Sigma => (Side::Left, Side::Left),
            OutputBlock::Gamma => (Side::Left, Side::Right),
            OutputBlock::SigmaBar => (Side::Right, Side::Right),
        }
    }
}

/// Input state that is the vacuum outside at most two full-cavity modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SparseInput {
    Vacuum,
    /// Mode `k` carries the 2×2 covariance `cov`.
    SingleMode { k: usize, cov: Matrix2<f64> },
    /// Modes `k < k2` carry the 4×4 covariance `cov`.
    TwoMode { k: usize, k2: usize, cov: Matrix4<f64> },
}

impl SparseInput {
    fn check(&self, trunc: TruncationConfig) -> Result<()> {
        let limit = trunc.input_modes();
        let in_range = |k: usize| {
            if k == 0 || k > limit {
                Err(Error::IndexOutOfRange { index: k, n_modes: limit })
            } else {
                Ok(())
            }
        };
        match *self {
            SparseInput::Vacuum => Ok(()),
            SparseInput::SingleMode { k, .. } => in_range(k),
            SparseInput::TwoMode { k, k2, .. } => {
                in_range(k)?;
                in_range(k2)?;
                if k >= k2 {
                    return Err(Error::Domain(format!("two-mode input needs k < k', got ({k}, {k2})")));
                }
                Ok(())
            }
        }
    }

    fn excites(&self, l: usize) -> bool {
        match *self {
            SparseInput::Vacuum => false,
            SparseInput::SingleMode { k, .. } => l == k,
            SparseInput::TwoMode { k, k2, .. } => l == k || l == k2,
        }
    }
}

fn check_output(trunc: TruncationConfig, i: usize) -> Result<()> {
    if i == 0 || i > trunc.modes_per_side() {
        return Err(Error::IndexOutOfRange {
            index: i,
            n_modes: trunc.modes_per_side(),
        });
    }
    Ok(())
}

/// The `(i, j)` block of the requested quadrant for a sparse input.
///
/// Vacuum modes contribute `Σ_l A_il·B_jlᵀ`; excited modes contribute
/// `A_ik·σ_kk′·B_jk′ᵀ` for every pair of excited modes.
pub fn output_block(
    geom: &CavityGeometry,
    trunc: TruncationConfig,
    input: &SparseInput,
    which: OutputBlock,
    i: usize,
    j: usize,
) -> Result<Matrix2<f64>> {
    input.check(trunc)?;
    check_output(trunc, i)?;
    check_output(trunc, j)?;
    let (side_i, side_j) = which.sides();

    let mut acc = Matrix2::zeros();
    for l in 1..=trunc.input_modes() {
        if input.excites(l) {
            continue;
        }
        acc += geom.s_block(side_i, i, l)? * geom.s_block(side_j, j, l)?.transpose();
    }

    match *input {
        SparseInput::Vacuum => {}
        SparseInput::SingleMode { k, cov } => {
            acc += geom.s_block(side_i, i, k)? * cov * geom.s_block(side_j, j, k)?.transpose();
        }
        SparseInput::TwoMode { k, k2, cov } => {
            let modes = [k, k2];
            for (a, &ka) in modes.iter().enumerate() {
                let left = geom.s_block(side_i, i, ka)?;
                for (b, &kb) in modes.iter().enumerate() {
                    let sub = cov.fixed_view::<2, 2>(2 * a, 2 * b);
                    acc += left * sub * geom.s_block(side_j, j, kb)?.transpose();
                }
            }
        }
    }
    Ok(acc)
}

/// Block of `σ`, `γ` or `σ̄` when only mode `k` departs from the vacuum.
pub fn single_mode_output_blocks(
    geom: &CavityGeometry,
    trunc: TruncationConfig,
    sigma_in: &Matrix2<f64>,
    k: usize,
    i: usize,
    j: usize,
    which: OutputBlock,
) -> Result<Matrix2<f64>> {
    let input = SparseInput::SingleMode { k, cov: *sigma_in };
    output_block(geom, trunc, &input, which, i, j)
}

/// Block of `σ`, `γ` or `σ̄` when modes `k < k2` carry a joint 4×4 covariance.
#[allow(clippy::too_many_arguments)]
pub fn two_mode_output_blocks(
    geom: &CavityGeometry,
    trunc: TruncationConfig,
    sigma_in: &Matrix4<f64>,
    k: usize,
    k2: usize,
    i: usize,
    j: usize,
    which: OutputBlock,
) -> Result<Matrix2<f64>> {
    let input = SparseInput::TwoMode { k, k2, cov: *sigma_in };
    output_block(geom, trunc, &input, which, i, j)
}

/// Reduced covariance `[[σ_nn, γ_nm], [γ_nmᵀ, σ̄_mm]]` of `u_n` and `ū_m`.
pub fn reduced_pair_cov(
    geom: &CavityGeometry,
    trunc: TruncationConfig,
    input: &SparseInput,
    n: usize,
    m: usize,
) -> Result<Matrix4<f64>> {
    let sigma = output_block(geom, trunc, input, OutputBlock::Sigma, n, n)?;
    let gamma = output_block(geom, trunc, input, OutputBlock::Gamma, n, m)?;
    let sigma_bar = output_block(geom, trunc, input, OutputBlock::SigmaBar, m, m)?;
    let mut out = Matrix4::zeros();
    out.fixed_view_mut::<2, 2>(0, 0).copy_from(&sigma);
    out.fixed_view_mut::<2, 2>(0, 2).copy_from(&gamma);
    out.fixed_view_mut::<2, 2>(2, 0).copy_from(&gamma.transpose());
    out.fixed_view_mut::<2, 2>(2, 2).copy_from(&sigma_bar);
    Ok(out)
}

/// Second-moment part `¼(Tr σ_nn − 2)` of the particle number in output mode
/// `n` on `side`.
pub fn second_moment_particles(
    geom: &CavityGeometry,
    trunc: TruncationConfig,
    input: &SparseInput,
    side: Side,
    n: usize,
) -> Result<f64> {
    let which = match side {
        Side::Left => OutputBlock::Sigma,
        Side::Right => OutputBlock::SigmaBar,
    };
    let block = output_block(geom, trunc, input, which, n, n)?;
    Ok(0.25 * (block.trace() - 2.0))
}

/// First-moment contribution `½(⟨q_n⟩² + ⟨p_n⟩²)` to the particle number of
/// output mode `n` when full-cavity mode `k` holds a coherent state
/// `(ρ, φ)`: `½·4ρ²V_nk²(ω_n²cos²φ + Ω_k²sin²φ)`.
pub fn coherent_particles_closed_form(
    geom: &CavityGeometry,
    side: Side,
    n: usize,
    k: usize,
    rho: f64,
    phi: f64,
) -> Result<f64> {
    let v = geom.v_coeff(side, n, k)?;
    let omega = geom.side_frequency(side, n)?;
    let big_omega = geom.input_frequency(k)?;
    let (c, s) = (phi.cos(), phi.sin());
    Ok(2.0 * rho * rho * v * v * (omega * omega * c * c + big_omega * big_omega * s * s))
}

/// Lowest-mode blocks for a squeezed thermal state in `U_1`, mirror at the
/// midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowestModeBlocks {
    pub sigma11: Matrix2<f64>,
    pub gamma11: Matrix2<f64>,
    pub sigma_bar11: Matrix2<f64>,
}

/// `σ_11` for a squeezed thermal input in `U_1`, written out in the overlap
/// coefficients; `γ_11` is the same sum with the `l = 2` term negated and
/// `σ̄_11 = σ_11`. Only valid for a midpoint mirror.
pub fn squeezed_thermal_sigma11(
    geom: &CavityGeometry,
    trunc: TruncationConfig,
    nbar: f64,
    s: f64,
    theta: f64,
) -> Result<LowestModeBlocks> {
    if !geom.is_midpoint() {
        let (p, q) = geom.mirror_fraction();
        return Err(Error::UnsupportedGeometry(format!(
            "lowest-mode closed form needs the mirror at R/2, got {p}/{q}"
        )));
    }
    let omega1 = geom.side_frequency(Side::Left, 1)?;
    let big1 = geom.input_frequency(1)?;
    let v11 = geom.v_coeff(Side::Left, 1, 1)?;
    let (ch, sh) = ((2.0 * s).cosh(), (2.0 * s).sinh());
    let (c2, s2) = ((2.0 * theta).cos(), (2.0 * theta).sin());
    let squeezed = 4.0
        * v11
        * v11
        * (2.0 * nbar + 1.0)
        * Matrix2::new(
            omega1 * omega1 * (ch - c2 * sh),
            omega1 * big1 * s2 * sh,
            omega1 * big1 * s2 * sh,
            big1 * big1 * (ch + c2 * sh),
        );

    let mut rest = Matrix2::zeros();
    let mut flipped = Matrix2::zeros();
    for l in 2..=trunc.input_modes() {
        let v = geom.v_coeff(Side::Left, 1, l)?;
        let big = geom.input_frequency(l)?;
        let term = 4.0 * v * v * Matrix2::new(omega1 * omega1, 0.0, 0.0, big * big);
        rest += term;
        flipped += if l == 2 { -term } else { term };
    }
    let sigma11 = squeezed + rest;
    Ok(LowestModeBlocks {
        sigma11,
        gamma11: squeezed + flipped,
        sigma_bar11: sigma11,
    })
}

/// Particle number in output mode `n` on `side` for a squeezed thermal state
/// in `U_1`:
/// `V_n1²(2n̄+1)[(ch − c₂sh)ω_n² + (ch + c₂sh)Ω_1²] + Σ_{l≥2} V_nl²(ω_n² + Ω_l²) − ½`.
#[allow(clippy::too_many_arguments)]
pub fn squeezed_thermal_particles(
    geom: &CavityGeometry,
    trunc: TruncationConfig,
    side: Side,
    n: usize,
    nbar: f64,
    s: f64,
    theta: f64,
) -> Result<f64> {
    check_output(trunc, n)?;
    let omega = geom.side_frequency(side, n)?;
    let big1 = geom.input_frequency(1)?;
    let v1 = geom.v_coeff(side, n, 1)?;
    let (ch, sh) = ((2.0 * s).cosh(), (2.0 * s).sinh());
    let c2 = (2.0 * theta).cos();
    let mut total = v1
        * v1
        * (2.0 * nbar + 1.0)
        * ((ch - c2 * sh) * omega * omega + (ch + c2 * sh) * big1 * big1);
    for l in 2..=trunc.input_modes() {
        let v = geom.v_coeff(side, n, l)?;
        let big = geom.input_frequency(l)?;
        total += v * v * (omega * omega + big * big);
    }
    Ok(total - 0.5)
}

/// Single-mode squeezed thermal input in mode `k` as a [`SparseInput`].
pub fn squeezed_thermal_input(k: usize, nbar: f64, s: f64, theta: f64) -> SparseInput {
    SparseInput::SingleMode {
        k,
        cov: squeezed_thermal_cov(nbar, s, theta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn setup(cutoff: usize) -> (CavityGeometry, TruncationConfig) {
        (
            CavityGeometry::midpoint(2.0).unwrap(),
            TruncationConfig::new(cutoff).unwrap(),
        )
    }

    #[test]
    fn coherent_first_moment_values() {
        let (g, _) = setup(4);
        let v = coherent_particles_closed_form(&g, Side::Left, 1, 1, 1.0, 0.0).unwrap();
        assert_relative_eq!(v, 32.0 / (9.0 * PI * PI), max_relative = 1e-14);
        assert_eq!(coherent_particles_closed_form(&g, Side::Left, 1, 1, 0.0, 0.3).unwrap(), 0.0);
        for &phi in &[0.1, 0.9, 2.2] {
            let a = coherent_particles_closed_form(&g, Side::Right, 2, 3, 1.3, phi).unwrap();
            let b = coherent_particles_closed_form(&g, Side::Right, 2, 3, 1.3, phi + PI).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-13);
        }
    }

    #[test]
    fn identity_input_gives_vacuum_blocks() {
        let (g, t) = setup(6);
        for which in [OutputBlock::Sigma, OutputBlock::Gamma, OutputBlock::SigmaBar] {
            let vac = output_block(&g, t, &SparseInput::Vacuum, which, 2, 3).unwrap();
            let one = single_mode_output_blocks(&g, t, &Matrix2::identity(), 5, 2, 3, which).unwrap();
            let two = two_mode_output_blocks(&g, t, &Matrix4::identity(), 1, 7, 2, 3, which).unwrap();
            assert_relative_eq!(vac, one, epsilon = 1e-15);
            assert_relative_eq!(vac, two, epsilon = 1e-15);
        }
    }

    #[test]
    fn uncorrelated_two_mode_input_decouples() {
        let (g, t) = setup(5);
        let a = squeezed_thermal_cov(0.3, 0.0, 0.0);
        let b = squeezed_thermal_cov(1.2, 0.0, 0.0);
        let mut joint = Matrix4::zeros();
        joint.fixed_view_mut::<2, 2>(0, 0).copy_from(&a);
        joint.fixed_view_mut::<2, 2>(2, 2).copy_from(&b);
        let two = two_mode_output_blocks(&g, t, &joint, 2, 4, 1, 1, OutputBlock::Gamma).unwrap();
        let only_a = single_mode_output_blocks(&g, t, &a, 2, 1, 1, OutputBlock::Gamma).unwrap();
        let only_b = single_mode_output_blocks(&g, t, &b, 4, 1, 1, OutputBlock::Gamma).unwrap();
        let vac = output_block(&g, t, &SparseInput::Vacuum, OutputBlock::Gamma, 1, 1).unwrap();
        assert_relative_eq!(two, only_a + only_b - vac, epsilon = 1e-14);
    }

    #[test]
    fn diagonal_blocks_symmetric() {
        let (g, t) = setup(5);
        let cov = squeezed_thermal_cov(0.2, 0.7, 0.4);
        for which in [OutputBlock::Sigma, OutputBlock::SigmaBar] {
            let b = single_mode_output_blocks(&g, t, &cov, 1, 3, 3, which).unwrap();
            assert_relative_eq!(b, b.transpose(), epsilon = 1e-15);
        }
    }

    #[test]
    fn index_errors() {
        let (g, t) = setup(3);
        let id = Matrix2::identity();
        assert!(single_mode_output_blocks(&g, t, &id, 7, 1, 1, OutputBlock::Sigma).is_err());
        assert!(single_mode_output_blocks(&g, t, &id, 1, 4, 1, OutputBlock::Sigma).is_err());
        assert!(two_mode_output_blocks(&g, t, &Matrix4::identity(), 2, 2, 1, 1, OutputBlock::Sigma).is_err());
    }

    #[test]
    fn lowest_mode_closed_form_at_vacuum() {
        let (g, t) = setup(8);
        let blocks = squeezed_thermal_sigma11(&g, t, 0.0, 0.0, 0.0).unwrap();
        let omega1 = PI;
        let mut expected = Matrix2::zeros();
        for l in 1..=16 {
            let v = g.v_coeff(Side::Left, 1, l).unwrap();
            let big = g.input_frequency(l).unwrap();
            expected += 4.0 * v * v * Matrix2::new(omega1 * omega1, 0.0, 0.0, big * big);
        }
        assert_relative_eq!(blocks.sigma11, expected, max_relative = 1e-14);
        assert_eq!(blocks.sigma11, blocks.sigma_bar11);

        let off = CavityGeometry::new(2.0, 1, 3).unwrap();
        assert!(matches!(
            squeezed_thermal_sigma11(&off, t, 0.0, 0.0, 0.0),
            Err(Error::UnsupportedGeometry(_))
        ));
    }

    #[test]
    fn quarter_angle_moves_squeezing_off_diagonal() {
        let (g, t) = setup(4);
        let base = squeezed_thermal_sigma11(&g, t, 0.0, 0.0, 0.0).unwrap();
        let sq = squeezed_thermal_sigma11(&g, t, 0.0, 0.8, PI / 4.0).unwrap();
        let v11 = g.v_coeff(Side::Left, 1, 1).unwrap();
        let (w, big) = (PI, PI / 2.0);
        let ch = 1.6f64.cosh();
        let sh = 1.6f64.sinh();
        let diff = sq.sigma11 - base.sigma11;
        assert_relative_eq!(diff[(0, 0)], 4.0 * v11 * v11 * w * w * (ch - 1.0), max_relative = 1e-12);
        assert_relative_eq!(diff[(1, 1)], 4.0 * v11 * v11 * big * big * (ch - 1.0), max_relative = 1e-12);
        assert_relative_eq!(diff[(0, 1)], 4.0 * v11 * v11 * w * big * sh, max_relative = 1e-12);
    }

    #[test]
    fn thermal_particles_linear_in_occupation() {
        let (g, t) = setup(16);
        let p = |nbar| squeezed_thermal_particles(&g, t, Side::Left, 2, nbar, 0.0, 0.0).unwrap();
        let (p0, p1, p3) = (p(0.0), p(1.0), p(3.0));
        assert_relative_eq!(p3 - p0, 3.0 * (p1 - p0), max_relative = 1e-12);
    }
}
