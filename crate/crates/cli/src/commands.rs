//! Dispatch a validated [`RunConfig`] to the experiment drivers.

use mirrorcut::experiments::{
    coherent_phase_sweep, convergence_study, entanglement_distribution, negativity_vs_particles,
    phase_averaged_coherent, single_mode_sweep, squeezing_temperature_scan, InitialState, Observable,
    SingleModeFamily, SingleModeParams, Value,
};
use mirrorcut::fmt::sci17;
use mirrorcut::{GaussianState, Side, SymplecticTransform};

use crate::config::{Experiment, InitialKind, ObservableKind, RunConfig};
use crate::emit::Table;
use crate::CliError;

/// Result of one run: the main table, an optional side table and a short
/// human-readable summary.
#[derive(Debug)]
pub struct Outcome {
    pub table: Option<Table>,
    pub thresholds: Option<Table>,
    pub summary: Vec<String>,
    /// Set when the run completed but the result should fail the process.
    pub failure: Option<String>,
}

impl Outcome {
    fn table(table: Table) -> Self {
        Self { table: Some(table), thresholds: None, summary: Vec::new(), failure: None }
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let geom = cfg.geometry()?;
    let trunc = cfg.truncation()?;
    let st = &cfg.state;
    let opt = &cfg.options;
    let base = cfg.log_base;

    let outcome = match cfg.experiment {
        Experiment::Fig2 => {
            let recs = coherent_phase_sweep(&geom, trunc, st.k, &cfg.grids.phi.points(), opt.n_max)?;
            Outcome::table(Table::from_records(&recs, &[])?)
        }
        Experiment::Fig3 => {
            let recs = phase_averaged_coherent(&geom, trunc, st.k, opt.n_max, st.rho)?;
            let mut out = Outcome::table(Table::from_records(&recs, &[])?);
            if let Some(last) = recs.last() {
                out.summary.push(format!(
                    "modes 1..={}: {:.4}% first-moment, {:.4}% including vacuum",
                    opt.n_max,
                    last.real("cumulative_first_moment_percent").unwrap_or(f64::NAN),
                    recs.iter().filter_map(|r| r.real("total_percent")).sum::<f64>()
                ));
            }
            out
        }
        Experiment::Fig4 => {
            let recs = negativity_vs_particles(
                &geom,
                trunc,
                base,
                &SingleModeFamily::FIGURE_SET,
                &cfg.grids.particles.points(),
            )?;
            Outcome::table(Table::from_records(&recs, &[])?)
        }
        Experiment::Fig5 => {
            let scan = squeezing_temperature_scan(
                &geom,
                trunc,
                base,
                &opt.nbars,
                &cfg.grids.squeezing.points(),
                st.theta,
            )?;
            let mut thresholds = Table::new(["nbar", "s_star"]);
            let mut summary = Vec::new();
            for t in &scan.thresholds {
                thresholds.push(vec![Value::Real(t.nbar), Value::from(t.s_star)])?;
                summary.push(match t.s_star {
                    Some(s) => format!("nbar={} s*={}", t.nbar, sci17(s)),
                    None => format!("nbar={} s*=none on grid", t.nbar),
                });
            }
            Outcome {
                table: Some(Table::from_records(&scan.records, &[])?),
                thresholds: Some(thresholds),
                summary,
                failure: None,
            }
        }
        Experiment::Fig6 => {
            let initial = match st.initial {
                InitialKind::Vacuum => InitialState::Vacuum,
                InitialKind::Tms => InitialState::TwoModeSqueezed { s: st.s, theta: st.theta },
                InitialKind::Stripped => InitialState::StrippedTwoModeSqueezed { s: st.s, theta: st.theta },
            };
            let grid = entanglement_distribution(&geom, trunc, base, initial, opt.size)?;
            let mut out = Outcome::table(Table::from_heatmap(&grid));
            out.summary.push(format!("{}: asymmetry {:.3e}", grid.initial, grid.asymmetry()));
            out
        }
        Experiment::Sweep => {
            let params = SingleModeParams { nbar: st.nbar, s: st.s, theta: st.theta, rho: st.rho, phi: st.phi };
            let recs = single_mode_sweep(
                &geom,
                trunc,
                base,
                st.k,
                params,
                opt.parameter.to_core(),
                &cfg.grids.sweep.points(),
                (opt.n, opt.m),
            )?;
            Outcome::table(Table::from_records(&recs, &[])?)
        }
        Experiment::Validate => validate(cfg, &geom, trunc)?,
        Experiment::Converge => {
            let observable = match opt.observable {
                ObservableKind::VacuumNegativity => Observable::VacuumNegativity { n: opt.n, m: opt.m },
                ObservableKind::VacuumParticles => Observable::VacuumParticles { n: opt.n },
                ObservableKind::CoherentParticles => {
                    Observable::CoherentParticles { n: opt.n, k: st.k, rho: st.rho, phi: st.phi }
                }
                ObservableKind::TotalParticles => Observable::TotalVacuumParticles,
                ObservableKind::Defect => Observable::SymplecticDefect,
            };
            let recs = convergence_study(&geom, &opt.lambdas, observable, base)?;
            Outcome::table(Table::from_records(&recs, &[])?)
        }
    };
    Ok(outcome)
}

fn validate(
    cfg: &RunConfig,
    geom: &mirrorcut::CavityGeometry,
    trunc: mirrorcut::TruncationConfig,
) -> Result<Outcome, CliError> {
    let opt = &cfg.options;
    let (source, state) = match &opt.input {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::io(path, source))?;
            (path.display().to_string(), GaussianState::from_json(&text)?)
        }
        None => {
            let transform = SymplecticTransform::build(geom, trunc)?;
            let out = GaussianState::vacuum(trunc.input_modes())?.apply_transform(&transform)?;
            match opt.modes {
                Some(k) => {
                    let modes: Vec<usize> = Side::BOTH
                        .iter()
                        .flat_map(|&side| (1..=k).map(move |n| trunc.output_mode(side, n)))
                        .collect::<Result<_, _>>()?;
                    (format!("vacuum lambda={} lowest {k} per side", trunc.cutoff()), out.reduce_modes(&modes)?)
                }
                None => (format!("vacuum lambda={}", trunc.cutoff()), out),
            }
        }
    };
    if let Some(path) = &opt.save_state {
        std::fs::write(path, state.to_json()?).map_err(|source| CliError::io(path, source))?;
    }
    let report = state.validate();
    let mut table = Table::new([
        "source",
        "n_modes",
        "asymmetry",
        "min_eigenvalue",
        "min_symplectic_eigenvalue",
        "deficit",
        "ok",
    ]);
    table.push(vec![
        Value::Text(source.clone()),
        Value::from(state.n_modes()),
        Value::Real(report.asymmetry),
        Value::Real(report.min_eigenvalue),
        Value::Real(report.min_symplectic_eigenvalue),
        Value::Real(report.deficit),
        Value::from(usize::from(report.ok)),
    ])?;
    let failure = (opt.strict && !report.ok).then(|| format!("{source}: {report}"));
    Ok(Outcome {
        // The report goes to stdout; a table is only written on request.
        table: cfg.output.is_some().then_some(table),
        thresholds: None,
        summary: vec![
            format!("{source}: {report}"),
            format!("worst symplectic eigenvalue deficit: {}", sci17(report.deficit)),
        ],
        failure,
    })
}
