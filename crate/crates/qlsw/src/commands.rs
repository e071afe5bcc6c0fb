//! Subcommand implementations. Every output file is written to a temporary
//! name and renamed into place.

use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use serde::Serialize;

use qlsw_core::hhl::{self, CircuitVariant, HHLConfig, LinearSystemInstance};
use qlsw_core::photonic::{self, NoiseParams};
use qlsw_core::tomo;
use qlsw_core::Complex64;

use crate::cli::{SamplingArgs, Variant};
use crate::error::CliError;
use crate::formats::{
    density_csv, parse_state, sweep_csv, vector_out, CircuitJson, CountsFile, GridFile,
    InstanceFile, NoiseFile, NoiseJson, PhotonicReport, SolveReport, SweepRow, TomographyJson,
};

pub const DEFAULT_SEED: u64 = 1;

/// Resolved sampling settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Settings {
    pub seed: u64,
    pub shots: u64,
    pub trials: usize,
}

impl Settings {
    /// Flag (or `QLSW_SEED`) first, then the noise file, then the defaults.
    pub fn resolve(
        noise_path: Option<&Path>,
        args: &SamplingArgs,
    ) -> Result<(NoiseParams, Self), CliError> {
        let file = match noise_path {
            Some(p) => read_json::<NoiseFile>(p)?,
            None => NoiseFile::default(),
        };
        let noise = file.params()?;
        let seed = check_seed(args.seed.or(file.seed).unwrap_or(DEFAULT_SEED))?;
        let shots = args.shots.or(file.shots).unwrap_or(tomo::DEFAULT_SHOTS);
        if shots == 0 {
            return Err(CliError::new("invalid_parameter", "shots must be positive"));
        }
        if args.trials < tomo::MIN_TRIALS {
            return Err(CliError::new(
                "invalid_parameter",
                format!("trials must be at least {}", tomo::MIN_TRIALS),
            ));
        }
        Ok((
            noise,
            Self {
                seed,
                shots,
                trials: args.trials,
            },
        ))
    }
}

pub fn check_seed(seed: u64) -> Result<u64, CliError> {
    if seed == 0 {
        return Err(CliError::new("invalid_parameter", "seed must be positive"));
    }
    Ok(seed)
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::from(e).context(&path.display().to_string()))?;
    serde_json::from_str(&text).map_err(|e| CliError::from(e).context(&path.display().to_string()))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    let io = |e: std::io::Error| CliError::from(e).context(&path.display().to_string());
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

fn out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::from(e).context(&dir.display().to_string()))
}

fn load_instance(path: &Path) -> Result<(LinearSystemInstance, HHLConfig), CliError> {
    read_json::<InstanceFile>(path)?.build()
}

pub fn solve_report(
    inst: &LinearSystemInstance,
    cfg: &HHLConfig,
    variant: Variant,
) -> Result<(SolveReport, CircuitJson), CliError> {
    let v = match variant {
        Variant::General => CircuitVariant::General,
        Variant::Optimized => CircuitVariant::Optimized,
    };
    let record = hhl::run_pipeline(inst, cfg, v)?;
    let report = SolveReport {
        variant: match variant {
            Variant::General => "general",
            Variant::Optimized => "optimized",
        }
        .into(),
        x: vector_out(&record.x),
        success_probability: record.success_probability,
        fidelity_to_classical: record.fidelity_to_classical,
        theta: record.theta,
        eigenvalues: record.eigenvalues.clone(),
        n_digit: record.digit,
        condition_number: inst.condition_number(),
    };
    Ok((report, CircuitJson::from(&record.circuit)))
}

pub fn solve(instance: &Path, variant: Variant, out: Option<&Path>) -> Result<(), CliError> {
    let (inst, cfg) = load_instance(instance)?;
    let (report, circuit) = solve_report(&inst, &cfg, variant)?;
    match out {
        None => print!("{}", to_json(&report)?),
        Some(dir) => {
            out_dir(dir)?;
            write_atomic(&dir.join("solution.json"), &to_json(&report)?)?;
            write_atomic(&dir.join("circuit.json"), &to_json(&circuit)?)?;
        }
    }
    Ok(())
}

/// Output files of one photonic run.
pub struct PhotonicOutput {
    pub report: PhotonicReport,
    pub counts: CountsFile,
    pub rho_csv: String,
}

pub fn photonic_run(
    inst: &LinearSystemInstance,
    cfg: &HHLConfig,
    noise: &NoiseParams,
    settings: &Settings,
) -> Result<PhotonicOutput, CliError> {
    let result = photonic::run_experiment(inst, cfg, noise, settings.shots, settings.seed)?;
    let target = hhl::classical_solve(inst);
    let tomography =
        tomo::monte_carlo_errors(&result.counts, &target, settings.trials, settings.seed)?;
    let values = inst.eigenvalues();
    let report = PhotonicReport {
        exact_fidelity: qlsw_core::qmat::state_fidelity(&result.state.rho, &target)?,
        success_probability: result.state.success_rate,
        double_emission_share: result.state.double_emission_share,
        eigenvalues: values.to_vec(),
        theta: hhl::rotation_angle(cfg.c, values[values.len() - 1])?,
        shots: settings.shots,
        noise: NoiseJson::from(noise),
        tomography: TomographyJson::new(&tomography, &target, settings.seed),
    };
    Ok(PhotonicOutput {
        counts: CountsFile::from_records(&result.counts),
        rho_csv: density_csv(&tomography.rho)?,
        report,
    })
}

pub fn photonic(
    instance: &Path,
    noise: &NoiseParams,
    settings: &Settings,
    out: &Path,
) -> Result<(), CliError> {
    let (inst, cfg) = load_instance(instance)?;
    let output = photonic_run(&inst, &cfg, noise, settings)?;
    out_dir(out)?;
    write_atomic(&out.join("counts.json"), &to_json(&output.counts)?)?;
    write_atomic(&out.join("report.json"), &to_json(&output.report)?)?;
    write_atomic(&out.join("rho.csv"), &output.rho_csv)
}

/// Runs every grid point (in parallel) and returns rows in grid order.
/// Point `i` uses seed `settings.seed + i` and writes `point_{i}.json` to `out`.
pub fn sweep_rows(
    grid: &GridFile,
    noise: &NoiseParams,
    settings: &Settings,
    out: &Path,
) -> Result<Vec<SweepRow>, CliError> {
    let points = grid.points()?;
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<SweepRow, CliError>>>> =
        Mutex::new(vec![None; points.len()]);
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(points.len());
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(point) = points.get(i) else { break };
                let point_settings = Settings {
                    seed: settings.seed.wrapping_add(i as u64),
                    ..*settings
                };
                let row = photonic_run(&point.instance, &point.config, noise, &point_settings)
                    .and_then(|o| {
                        write_atomic(
                            &out.join(format!("point_{i:03}.json")),
                            &to_json(&o.report)?,
                        )?;
                        Ok(SweepRow {
                            input: point.label.clone(),
                            lambda_1: point.spectrum[0],
                            lambda_2: point.spectrum[1],
                            fidelity: o.report.exact_fidelity,
                            error: o.report.tomography.fidelity_error,
                            measured_fidelity: o.report.tomography.fidelity,
                            success_probability: o.report.success_probability,
                        })
                    });
                results
                    .lock()
                    .expect("no worker panics while holding the lock")[i] = Some(row);
            });
        }
    });
    results
        .into_inner()
        .map_err(|_| CliError::internal("sweep worker panicked"))?
        .into_iter()
        .map(|r| r.unwrap_or_else(|| Err(CliError::internal("sweep point was never run"))))
        .collect()
}

pub fn sweep(
    grid: &Path,
    noise: &NoiseParams,
    settings: &Settings,
    out: &Path,
) -> Result<(), CliError> {
    let grid: GridFile = read_json(grid)?;
    grid.points()?;
    out_dir(out)?;
    let rows = sweep_rows(&grid, noise, settings, out)?;
    write_atomic(&out.join("sweep.csv"), &sweep_csv(&rows)?)
}

fn tomo_target(instance: Option<&Path>, target: Option<&Path>) -> Result<Vec<Complex64>, CliError> {
    match (instance, target) {
        (Some(p), None) => Ok(hhl::classical_solve(&load_instance(p)?.0)),
        (None, Some(p)) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::from(e).context(&p.display().to_string()))?;
            parse_state(&text)
        }
        _ => Err(CliError::new(
            "usage",
            "give exactly one of --instance and --target",
        )),
    }
}

pub fn tomo(
    counts: &Path,
    instance: Option<&Path>,
    target: Option<&Path>,
    seed: u64,
    trials: usize,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let records = read_json::<CountsFile>(counts)?.records()?;
    let target = tomo_target(instance, target)?;
    let report = tomo::monte_carlo_errors(&records, &target, trials, seed)?;
    let json = to_json(&TomographyJson::new(
        &report,
        &qlsw_core::qmat::normalize(&target)?,
        seed,
    ))?;
    match out {
        None => print!("{json}"),
        Some(dir) => {
            out_dir(dir)?;
            write_atomic(&dir.join("tomography.json"), &json)?;
        }
    }
    Ok(())
}
