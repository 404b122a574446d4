//! Sweep drivers producing the data sets behind each figure.
//!
//! Points are evaluated in parallel with rayon; results are always collected
//! in sweep order, so output does not depend on the thread count.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DVector;
use rayon::prelude::*;

use super::closed_form::{
    coherent_particles_closed_form, reduced_pair_cov, second_moment_particles,
    squeezed_thermal_input, SparseInput,
};
use super::record::{HeatmapGrid, SweepRecord};
use crate::error::{Error, Result};
use crate::gaussian::{log_negativity_of, two_mode_squeezed_cov, LogBase, Negativity};
use crate::modes::{CavityGeometry, Side, SymplecticTransform, TruncationConfig};

/// Bisection width for the squeezing threshold `s*`.
pub const SQUEEZING_THRESHOLD_TOL: f64 = 1e-4;

/// Entanglement between `u_n` and `ū_m` for a sparse input.
pub fn pair_negativity(
    geom: &CavityGeometry,
    trunc: TruncationConfig,
    input: &SparseInput,
    n: usize,
    m: usize,
    base: LogBase,
) -> Result<Negativity> {
    log_negativity_of(&reduced_pair_cov(geom, trunc, input, n, m)?, base)
}

/// Output first moments `S·x` for a coherent state `(1, φ)` in mode `k`.
fn coherent_output_moments(transform: &SymplecticTransform, k: usize, phi: f64) -> Result<DVector<f64>> {
    let n_in = transform.n_modes();
    if k == 0 || k > n_in {
        return Err(Error::IndexOutOfRange { index: k, n_modes: n_in });
    }
    let mut x = DVector::zeros(2 * n_in);
    x[2 * (k - 1)] = phi.cos();
    x[2 * (k - 1) + 1] = phi.sin();
    Ok(transform.matrix() * x)
}

fn first_moment_particles(moments: &DVector<f64>, mode: usize) -> f64 {
    let (q, p) = (moments[2 * (mode - 1)], moments[2 * (mode - 1) + 1]);
    0.5 * (q * q + p * p)
}

fn check_mode_count(trunc: TruncationConfig, n_max: usize) -> Result<()> {
    if n_max == 0 || n_max > trunc.modes_per_side() {
        return Err(Error::IndexOutOfRange {
            index: n_max,
            n_modes: trunc.modes_per_side(),
        });
    }
    Ok(())
}

/// Particle gain against phase for a coherent state in mode `k`.
///
/// For every `φ` and `n ∈ 1..=n_max` the record holds the first-moment
/// particle number in `u_n` and `ū_n` divided by the initial `ρ²/2`, from the
/// full transform of the moment vector.
pub fn coherent_phase_sweep(
    geom: &CavityGeometry,
    trunc: TruncationConfig,
    k: usize,
    phis: &[f64],
    n_max: usize,
) -> Result<Vec<SweepRecord>> {
    check_mode_count(trunc, n_max)?;
    let transform = SymplecticTransform::build(geom, trunc)?;
    let per_phi: Vec<Vec<SweepRecord>> = phis
        .par_iter()
        .enumerate()
        .map(|(ip, &phi)| {
            let y = coherent_output_moments(&transform, k, phi)?;
            (1..=n_max)
                .map(|n| {
                    let left = first_moment_particles(&y, trunc.output_mode(Side::Left, n)?) / 0.5;
                    let right = first_moment_particles(&y, trunc.output_mode(Side::Right, n)?) / 0.5;
                    SweepRecord::new("fig2", ip * n_max + (n - 1))
                        .with("phi", phi)
                        .with("n", n)
                        .with("k", k)
                        .with("lambda", trunc.cutoff())
                        .with("ratio_left", left)
                        .with("ratio_right", right)
                        .with("ratio", left + right)
                        .ensure_finite()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(per_phi.into_iter().flatten().collect())
}

/// Phase-averaged particle gain per output mode for a coherent state in mode
/// `k` with amplitude `rho`.
///
/// The first-moment ratio averages `cos²φ, sin²φ → ½`, which equals the mean
/// of the `φ = 0` and `φ = π/2` results. The vacuum (second-moment) particles
/// are reported separately, absolute and as a percentage of `ρ²/2`.
pub fn phase_averaged_coherent(
    geom: &CavityGeometry,
    trunc: TruncationConfig,
    k: usize,
    n_max: usize,
    rho: f64,
) -> Result<Vec<SweepRecord>> {
    check_mode_count(trunc, n_max)?;
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!("coherent amplitude must be > 0, got {rho}")));
    }
    let initial = 0.5 * rho * rho;
    let transform = SymplecticTransform::build(geom, trunc)?;
    let y0 = coherent_output_moments(&transform, k, 0.0)?;
    let y1 = coherent_output_moments(&transform, k, FRAC_PI_2)?;

    let rows: Vec<(f64, f64)> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let mut ratio = 0.0;
            let mut vacuum = 0.0;
            for side in Side::BOTH {
                let mode = trunc.output_mode(side, n)?;
                ratio += 0.5 * (first_moment_particles(&y0, mode) + first_moment_particles(&y1, mode)) / 0.5;
                vacuum += second_moment_particles(geom, trunc, &SparseInput::Vacuum, side, n)?;
            }
            Ok((ratio, vacuum))
        })
        .collect::<Result<_>>()?;

    let mut cumulative = 0.0;
    rows.into_iter()
        .enumerate()
        .map(|(i, (ratio, vacuum))| {
            cumulative += ratio;
            let vacuum_ratio = vacuum / initial;
            SweepRecord::new("fig3", i)
                .with("n", i + 1)
                .with("k", k)
                .with("lambda", trunc.cutoff())
                .with("rho", rho)
                .with("first_moment_ratio", ratio)
                .with("first_moment_percent", 100.0 * ratio)
                .with("cumulative_first_moment_percent", 100.0 * cumulative)
                .with("vacuum_particles", vacuum)
                .with("vacuum_percent", 100.0 * vacuum_ratio)
                .with("total_percent", 100.0 * (ratio + vacuum_ratio))
                .ensure_finite()
        })
        .collect()
}

/// Single-mode input families compared against their initial particle number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingleModeFamily {
    Thermal,
    Coherent,
    SqueezedVacuum { theta: f64 },
}

impl SingleModeFamily {
    pub const FIGURE_SET: [SingleModeFamily; 4] = [
        SingleModeFamily::Thermal,
        SingleModeFamily::Coherent,
        SingleModeFamily::SqueezedVacuum { theta: 0.0 },
        SingleModeFamily::SqueezedVacuum { theta: FRAC_PI_2 },
    ];

    pub fn label(&self) -> &'static str {
        match self {
            SingleModeFamily::Thermal => "thermal",
            SingleModeFamily::Coherent => "coherent",
            SingleModeFamily::SqueezedVacuum { .. } => "squeezed",
        }
    }
}

/// `E_N(u_1, ū_1)` and `⟨n̂⟩(u_1)` for each family with its initial particle
/// number on the grid, the excitation sitting in `U_1`.
///
/// Coherent states use `φ = 0` for the particle column; their entanglement
/// is that of the vacuum.
pub fn negativity_vs_particles(
    geom: &CavityGeometry,
    trunc: TruncationConfig,
    base: LogBase,
    families: &[SingleModeFamily],
    initial_particles: &[f64],
) -> Result<Vec<SweepRecord>> {
    if let Some(&x) = initial_particles.iter().find(|&&x| !(x >= 0.0 && x.is_finite())) {
        return Err(Error::Domain(format!("initial particle number must be >= 0, got {x}")));
    }
    let points: Vec<(SingleModeFamily, f64)> = families
        .iter()
        .flat_map(|&f| initial_particles.iter().map(move |&x| (f, x)))
        .collect();
    points
        .par_iter()
        .enumerate()
        .map(|(idx, &(family, x))| {
            let (nbar, rho, s, theta) = match family {
                SingleModeFamily::Thermal => (x, 0.0, 0.0, 0.0),
                SingleModeFamily::Coherent => (0.0, (2.0 * x).sqrt(), 0.0, 0.0),
                SingleModeFamily::SqueezedVacuum { theta } => (0.0, 0.0, x.sqrt().asinh(), theta),
            };
            let input = squeezed_thermal_input(1, nbar, s, theta);
            let neg = pair_negativity(geom, trunc, &input, 1, 1, base)?;
            let mut particles = second_moment_particles(geom, trunc, &input, Side::Left, 1)?;
            if rho > 0.0 {
                particles += coherent_particles_closed_form(geom, Side::Left, 1, 1, rho, 0.0)?;
            }
            SweepRecord::new("fig4", idx)
                .with("family", family.label())
                .with("initial_particles", x)
                .with("nbar", nbar)
                .with("rho", rho)
                .with("s", s)
                .with("theta", theta)
                .with("lambda", trunc.cutoff())
                .with("log_negativity", neg.value)
                .with("particles_u1", particles)
                .with("clamped", usize::from(neg.clamped))
                .ensure_finite()
        })
        .collect()
}

/// Smallest squeezing that makes `u_1`, `ū_1` entangled at thermal occupation `nbar`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingThreshold {
    pub nbar: f64,
    /// `None` when no grid point is entangled.
    pub s_star: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureScan {
    pub records: Vec<SweepRecord>,
    pub thresholds: Vec<SqueezingThreshold>,
}

fn squeezed_thermal_nu(
    geom: &CavityGeometry,
    trunc: TruncationConfig,
    nbar: f64,
    s: f64,
    theta: f64,
) -> Result<Negativity> {
    pair_negativity(geom, trunc, &squeezed_thermal_input(1, nbar, s, theta), 1, 1, LogBase::E)
}

/// `E_N(u_1, ū_1)` against squeezing `s` for each thermal occupation, with
/// the entanglement threshold `s*` per occupation: the first entangled grid
/// point, refined by bisection against its predecessor to
/// [`SQUEEZING_THRESHOLD_TOL`].
pub fn squeezing_temperature_scan(
    geom: &CavityGeometry,
    trunc: TruncationConfig,
    base: LogBase,
    nbars: &[f64],
    s_grid: &[f64],
    theta: f64,
) -> Result<TemperatureScan> {
    if s_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("squeezing grid must be ascending".into()));
    }
    let points: Vec<(f64, f64)> = nbars
        .iter()
        .flat_map(|&nb| s_grid.iter().map(move |&s| (nb, s)))
        .collect();
    let values: Vec<Negativity> = points
        .par_iter()
        .map(|&(nbar, s)| pair_negativity(geom, trunc, &squeezed_thermal_input(1, nbar, s, theta), 1, 1, base))
        .collect::<Result<_>>()?;

    let records = points
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(idx, (&(nbar, s), neg))| {
            SweepRecord::new("fig5", idx)
                .with("nbar", nbar)
                .with("s", s)
                .with("theta", theta)
                .with("lambda", trunc.cutoff())
                .with("log_negativity", neg.value)
                .with("clamped", usize::from(neg.clamped))
                .ensure_finite()
        })
        .collect::<Result<Vec<_>>>()?;

    let thresholds = nbars
        .par_iter()
        .enumerate()
        .map(|(i, &nbar)| {
            let row = &values[i * s_grid.len()..(i + 1) * s_grid.len()];
            let Some(first) = row.iter().position(|v| v.value > 0.0) else {
                return Ok(SqueezingThreshold { nbar, s_star: None });
            };
            if first == 0 {
                return Ok(SqueezingThreshold {
                    nbar,
                    s_star: Some(s_grid[0]),
                });
            }
            let (mut lo, mut hi) = (s_grid[first - 1], s_grid[first]);
            while hi - lo > SQUEEZING_THRESHOLD_TOL {
                let mid = 0.5 * (lo + hi);
                if squeezed_thermal_nu(geom, trunc, nbar, mid, theta)?.value > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok(SqueezingThreshold { nbar, s_star: Some(hi) })
        })
        .collect::<Result<_>>()?;

    Ok(TemperatureScan { records, thresholds })
}

/// Thermal occupation of `U_1` above which `u_1` and `ū_1` stop being
/// entangled, located by bisection to `tol`.
///
/// Returns `0` when the vacuum itself is separable.
pub fn thermal_death_threshold(geom: &CavityGeometry, trunc: TruncationConfig, tol: f64) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain("bisection tolerance must be positive".into()));
    }
    let entangled = |nbar: f64| -> Result<bool> { Ok(squeezed_thermal_nu(geom, trunc, nbar, 0.0, 0.0)?.value > 0.0) };
    if !entangled(0.0)? {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while entangled(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::InvalidState("entanglement never dies with temperature".into()));
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if entangled(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Initial states compared in the entanglement-distribution heatmaps. The
/// two-mode states occupy `U_1` and `U_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    Vacuum,
    TwoModeSqueezed { s: f64, theta: f64 },
    /// Two-mode squeezed state with its cross-correlations removed.
    StrippedTwoModeSqueezed { s: f64, theta: f64 },
}

impl InitialState {
    pub fn describe(&self) -> String {
        match self {
            InitialState::Vacuum => "vacuum".to_string(),
            InitialState::TwoModeSqueezed { s, theta } => format!("tms(s={s},theta={theta})"),
            InitialState::StrippedTwoModeSqueezed { s, theta } => format!("stripped(s={s},theta={theta})"),
        }
    }

    pub fn sparse_input(&self) -> SparseInput {
        match *self {
            InitialState::Vacuum => SparseInput::Vacuum,
            InitialState::TwoModeSqueezed { s, theta } => SparseInput::TwoMode {
                k: 1,
                k2: 2,
                cov: two_mode_squeezed_cov(s, theta),
            },
            InitialState::StrippedTwoModeSqueezed { s, theta } => {
                let mut cov = two_mode_squeezed_cov(s, theta);
                cov.fixed_view_mut::<2, 2>(0, 2).fill(0.0);
                cov.fixed_view_mut::<2, 2>(2, 0).fill(0.0);
                SparseInput::TwoMode { k: 1, k2: 2, cov }
            }
        }
    }
}

/// `E_N(u_n, ū_m)` for `n, m ∈ 1..=size`.
pub fn entanglement_distribution(
    geom: &CavityGeometry,
    trunc: TruncationConfig,
    base: LogBase,
    initial: InitialState,
    size: usize,
) -> Result<HeatmapGrid> {
    check_mode_count(trunc, size)?;
    let input = initial.sparse_input();
    let rows = (1..=size)
        .into_par_iter()
        .map(|n| {
            (1..=size)
                .map(|m| Ok(pair_negativity(geom, trunc, &input, n, m, base)?.value))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    HeatmapGrid::from_rows(initial.describe(), rows)
}

/// Quantity tracked across a ladder of cutoffs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    /// `E_N(u_n, ū_m)` for the vacuum input.
    VacuumNegativity { n: usize, m: usize },
    /// `⟨n̂⟩(u_n)` for the vacuum input.
    VacuumParticles { n: usize },
    /// `⟨n̂⟩(u_n)` for a coherent state `(ρ, φ)` in `U_k`.
    CoherentParticles { n: usize, k: usize, rho: f64, phi: f64 },
    /// Vacuum particles summed over every output mode; grows without bound.
    TotalVacuumParticles,
    /// Symplectic defect of the transform on `u_1`, `ū_1`.
    SymplecticDefect,
}

impl Observable {
    pub fn label(&self) -> String {
        match *self {
            Observable::VacuumNegativity { n, m } => format!("vacuum_negativity_{n}_{m}"),
            Observable::VacuumParticles { n } => format!("vacuum_particles_{n}"),
            Observable::CoherentParticles { n, k, .. } => format!("coherent_particles_{n}_k{k}"),
            Observable::TotalVacuumParticles => "total_vacuum_particles".to_string(),
            Observable::SymplecticDefect => "symplectic_defect".to_string(),
        }
    }

    pub fn evaluate(&self, geom: &CavityGeometry, trunc: TruncationConfig, base: LogBase) -> Result<f64> {
        match *self {
            Observable::VacuumNegativity { n, m } => {
                Ok(pair_negativity(geom, trunc, &SparseInput::Vacuum, n, m, base)?.value)
            }
            Observable::VacuumParticles { n } => {
                second_moment_particles(geom, trunc, &SparseInput::Vacuum, Side::Left, n)
            }
            Observable::CoherentParticles { n, k, rho, phi } => {
                if k == 0 || k > trunc.input_modes() {
                    return Err(Error::IndexOutOfRange {
                        index: k,
                        n_modes: trunc.input_modes(),
                    });
                }
                Ok(second_moment_particles(geom, trunc, &SparseInput::Vacuum, Side::Left, n)?
                    + coherent_particles_closed_form(geom, Side::Left, n, k, rho, phi)?)
            }
            Observable::TotalVacuumParticles => (1..=trunc.modes_per_side())
                .into_par_iter()
                .map(|n| {
                    Ok(Side::BOTH
                        .iter()
                        .map(|&side| second_moment_particles(geom, trunc, &SparseInput::Vacuum, side, n))
                        .collect::<Result<Vec<_>>>()?
                        .into_iter()
                        .sum::<f64>())
                })
                .collect::<Result<Vec<f64>>>()
                .map(|v| v.into_iter().sum()),
            Observable::SymplecticDefect => {
                let transform = SymplecticTransform::build(geom, trunc)?;
                transform.symplectic_defect(&[1, trunc.output_mode(Side::Right, 1)?])
            }
        }
    }
}

/// Evaluates `observable` for each cutoff in ascending order, with the change
/// from the previous cutoff.
pub fn convergence_study(
    geom: &CavityGeometry,
    cutoffs: &[usize],
    observable: Observable,
    base: LogBase,
) -> Result<Vec<SweepRecord>> {
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("cutoff ladder must be strictly ascending".into()));
    }
    let values: Vec<f64> = cutoffs
        .par_iter()
        .map(|&c| observable.evaluate(geom, TruncationConfig::new(c)?, base))
        .collect::<Result<_>>()?;
    let label = observable.label();
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let delta = (i > 0).then(|| v - values[i - 1]);
            SweepRecord::new("converge", i)
                .with("observable", label.as_str())
                .with("lambda", cutoffs[i])
                .with("value", v)
                .with("delta", delta)
                .ensure_finite()
        })
        .collect()
}

/// Single-mode input parameters: a displaced squeezed thermal state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModeParams {
    pub nbar: f64,
    pub s: f64,
    pub theta: f64,
    pub rho: f64,
    pub phi: f64,
}

/// Parameter varied by [`single_mode_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Nbar,
    S,
    Theta,
    Rho,
    Phi,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 5] = [
        SweepParameter::Nbar,
        SweepParameter::S,
        SweepParameter::Theta,
        SweepParameter::Rho,
        SweepParameter::Phi,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::Nbar => "nbar",
            SweepParameter::S => "s",
            SweepParameter::Theta => "theta",
            SweepParameter::Rho => "rho",
            SweepParameter::Phi => "phi",
        }
    }

    fn set(&self, params: &mut SingleModeParams, value: f64) {
        match self {
            SweepParameter::Nbar => params.nbar = value,
            SweepParameter::S => params.s = value,
            SweepParameter::Theta => params.theta = value,
            SweepParameter::Rho => params.rho = value,
            SweepParameter::Phi => params.phi = value,
        }
    }
}

/// Vary one parameter of a single-mode input in `U_k` and record
/// `E_N(u_n, ū_m)` together with the particle numbers of `u_n` and `ū_m`.
#[allow(clippy::too_many_arguments)]
pub fn single_mode_sweep(
    geom: &CavityGeometry,
    trunc: TruncationConfig,
    base: LogBase,
    k: usize,
    params: SingleModeParams,
    parameter: SweepParameter,
    values: &[f64],
    (n, m): (usize, usize),
) -> Result<Vec<SweepRecord>> {
    if k == 0 || k > trunc.input_modes() {
        return Err(Error::IndexOutOfRange { index: k, n_modes: trunc.input_modes() });
    }
    values
        .par_iter()
        .enumerate()
        .map(|(idx, &value)| {
            let mut p = params;
            parameter.set(&mut p, value);
            if !(p.nbar >= 0.0 && p.rho >= 0.0) {
                return Err(Error::Domain(format!("nbar and rho must be >= 0, got {} and {}", p.nbar, p.rho)));
            }
            let input = squeezed_thermal_input(k, p.nbar, p.s, p.theta);
            let neg = pair_negativity(geom, trunc, &input, n, m, base)?;
            let mut left = second_moment_particles(geom, trunc, &input, Side::Left, n)?;
            let mut right = second_moment_particles(geom, trunc, &input, Side::Right, m)?;
            if p.rho > 0.0 {
                left += coherent_particles_closed_form(geom, Side::Left, n, k, p.rho, p.phi)?;
                right += coherent_particles_closed_form(geom, Side::Right, m, k, p.rho, p.phi)?;
            }
            SweepRecord::new("sweep", idx)
                .with("parameter", parameter.name())
                .with("value", value)
                .with("k", k)
                .with("n", n)
                .with("m", m)
                .with("lambda", trunc.cutoff())
                .with("log_negativity", neg.value)
                .with("nu_min", neg.nu_min)
                .with("particles_left", left)
                .with("particles_right", right)
                .with("clamped", usize::from(neg.clamped))
                .ensure_finite()
        })
        .collect()
}

/// Evenly spaced grid over `[start, stop]`; a single point yields `start`.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { stop } else { start + step * i as f64 })
                .collect()
        }
    }
}

/// Phase grid over `[0, π]`.
pub fn phase_grid(count: usize) -> Vec<f64> {
    linspace(0.0, PI, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn setup(cutoff: usize) -> (CavityGeometry, TruncationConfig) {
        (
            CavityGeometry::midpoint(2.0).unwrap(),
            TruncationConfig::new(cutoff).unwrap(),
        )
    }

    #[test]
    fn grids() {
        assert_eq!(linspace(0.0, 1.0, 1), vec![0.0]);
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
        assert_eq!(*phase_grid(97).last().unwrap(), PI);
    }

    #[test]
    fn phase_sweep_shape() {
        let (g, t) = setup(8);
        let recs = coherent_phase_sweep(&g, t, 1, &phase_grid(5), 3).unwrap();
        assert_eq!(recs.len(), 15);
        assert!(recs.iter().enumerate().all(|(i, r)| r.index == i));
        assert_relative_eq!(recs[0].real("ratio").unwrap(), 128.0 / (9.0 * PI * PI), max_relative = 1e-12);
        assert!(coherent_phase_sweep(&g, t, 1, &[0.0], 9).is_err());
    }

    #[test]
    fn heatmap_of_vacuum_is_symmetric() {
        let (g, t) = setup(16);
        let grid = entanglement_distribution(&g, t, LogBase::E, InitialState::Vacuum, 4).unwrap();
        assert!(grid.asymmetry() <= 1e-10);
        assert!(grid.get(1, 1) > 0.0);
    }

    #[test]
    fn convergence_ladder_must_ascend() {
        let (g, _) = setup(1);
        assert!(convergence_study(&g, &[8, 4], Observable::SymplecticDefect, LogBase::E).is_err());
        let recs = convergence_study(&g, &[4, 8], Observable::VacuumParticles { n: 1 }, LogBase::E).unwrap();
        assert_eq!(recs[0].get("delta"), Some(&super::super::record::Value::Null));
        assert!(recs[1].real("delta").is_some());
    }

    #[test]
    fn single_mode_sweep_matches_families() {
        let (g, t) = setup(16);
        let base = SingleModeParams { nbar: 0.0, s: 0.0, theta: 0.0, rho: 0.0, phi: 0.0 };
        let xs = [0.0, 0.2, 0.4];
        let recs = single_mode_sweep(&g, t, LogBase::E, 1, base, SweepParameter::Nbar, &xs, (1, 1)).unwrap();
        let fam = negativity_vs_particles(&g, t, LogBase::E, &[SingleModeFamily::Thermal], &xs).unwrap();
        for (a, b) in recs.iter().zip(&fam) {
            assert_eq!(a.real("log_negativity"), b.real("log_negativity"));
            assert_eq!(a.real("particles_left"), b.real("particles_u1"));
            assert_relative_eq!(a.real("particles_left").unwrap(), a.real("particles_right").unwrap(), max_relative = 1e-12);
        }
        assert!(single_mode_sweep(&g, t, LogBase::E, 1, base, SweepParameter::Rho, &[-1.0], (1, 1)).is_err());
        assert!(single_mode_sweep(&g, t, LogBase::E, 33, base, SweepParameter::Rho, &[1.0], (1, 1)).is_err());
    }
}
