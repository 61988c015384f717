//! The `cech-monopole` command line: one subcommand per stage of the pipeline, a JSON
//! report on standard output or `--output`, and optional CSV plot data.
//!
//! Exit codes: 0 when the run passes, 1 when a scientific check fails (the report is
//! still written), 2 when the input is invalid.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::cochain::{Cochain, CochainValues};
use crate::cohomology::{cohomology, BettiReport};
use crate::collation::{
    build_partition, collate_to_form, collated_flux, quantize_with, LoopTransition,
    QuantizationReport, QuantizeOptions, Verdict, COLLATED_FLUX_TOLERANCE,
};
use crate::cover::{validate_coverage, CapCover, CoefficientTag, CoverSpec, CoverageReport};
use crate::error::{Error, Result};
use crate::figures::{
    betti_table, coverage_table, emit_figure_data, eta_scan, summary_table, sweep_scan,
    winding_scan, Table,
};
use crate::forms::{Builtin, PatchForm};
use crate::integrate::{contradiction_demo, ContradictionReport};
use crate::nerve::{nerve, Nerve, NerveJson};
use crate::worldline::{switch_point_sweep, ActionReport, SweepReport, Worldline};

/// Environment variable bounding the number of worker threads.
pub const THREADS_ENV: &str = "CECH_MONOPOLE_THREADS";
/// Lattice size for overlap samples unless `--samples` is given.
pub const DEFAULT_SAMPLES: usize = 200_000;
/// Accuracy demanded of the de Rham → Čech → de Rham flux round trip.
pub const ROUND_TRIP_TOLERANCE: f64 = 1e-6;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Coverage statistics and the nerve of a cover.
    Cover,
    /// Čech cohomology of the nerve.
    Cohomology,
    /// The quantization cocycle η and the integrality check.
    Quantize,
    /// Transition functions back to a global curvature through a partition of unity.
    Collate,
    /// Patched worldline action and its switch-point independence.
    Action,
    /// Winding number of the transition function around an annular overlap.
    Winding,
    /// One potential on the whole sphere contradicts nonzero flux.
    DemoContradiction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Coefficients {
    #[value(name = "Z")]
    Integer,
    #[value(name = "R")]
    Real,
}

/// Parsed command line.
#[derive(Clone, Debug, Parser)]
#[command(
    name = "cech-monopole",
    version,
    about = "Čech cohomology and Wu-Yang monopole quantization on the sphere"
)]
pub struct RunConfig {
    pub command: Command,
    /// Cover JSON file, or one of the built-in covers `wu-yang`, `three-caps`, `tetrahedral`.
    #[arg(long)]
    pub cover: Option<String>,
    /// Worldline JSON file (for `action`).
    #[arg(long)]
    pub worldline: Option<PathBuf>,
    /// Curvature: a built-in 2-form name (`monopole-F`, `hopf-F`).
    #[arg(long, default_value = "monopole-F")]
    pub form: String,
    /// Monopole strength.
    #[arg(
        short = 'G',
        long = "strength",
        default_value_t = 0.5,
        allow_negative_numbers = true
    )]
    pub g: f64,
    /// Charge.
    #[arg(
        short = 'q',
        long = "charge",
        default_value_t = 1.0,
        allow_negative_numbers = true
    )]
    pub q: f64,
    #[arg(long, default_value_t = 1e-8, allow_negative_numbers = true)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Lattice size for overlap samples.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Switch-point draws for `action`.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Coefficients for `cohomology`; defaults to those of the cover file.
    #[arg(long, value_enum)]
    pub coefficients: Option<Coefficients>,
    /// Report path; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// CSV path for plot data.
    #[arg(long)]
    pub figure_data: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverCommandReport {
    pub cover: CoverSpec,
    pub coverage: CoverageReport,
    pub nerve: NerveJson,
    pub euler_characteristic: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollateReport {
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    pub q: f64,
    pub tolerance: f64,
    pub quantization_verdict: Verdict,
    /// `∫ F` of the input curvature.
    pub total_flux: f64,
    /// `∫ F'` of the curvature rebuilt from the transition functions.
    pub collated_flux: f64,
    pub flux_error: f64,
    /// `∫ F''` rebuilt from the doubled transition functions.
    pub doubled_flux: f64,
    pub linearity_error: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionCommandReport {
    pub tolerance: f64,
    pub action: ActionReport,
    pub sweep: SweepReport,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingReport {
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    pub q: f64,
    pub tolerance: f64,
    pub edge: [usize; 2],
    pub winding: i64,
    /// Change of `g` once around the annulus.
    pub period: f64,
    pub total_flux: f64,
    /// `q ∫F / 2π`.
    pub chern_number: f64,
    pub residual: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContradictionCommandReport {
    #[serde(flatten)]
    pub demo: ContradictionReport,
    pub tolerance: f64,
    pub verdict: Verdict,
}

/// Any report the command line writes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Report {
    Cover(Box<CoverCommandReport>),
    Cohomology(BettiReport),
    Quantize(QuantizationReport),
    Collate(CollateReport),
    Action(ActionCommandReport),
    Winding(WindingReport),
    DemoContradiction(ContradictionCommandReport),
}

/// A report, whether it passed, and its plot data.
pub struct Outcome {
    pub report: Report,
    pub passed: bool,
    pub figure: Table,
}

fn verdict(pass: bool) -> Verdict {
    if pass {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Resolves `--cover`: an existing file, else a built-in name.
pub fn resolve_cover(arg: Option<&str>, default: &str) -> Result<CapCover> {
    let name = arg.unwrap_or(default);
    if Path::new(name).is_file() {
        return CapCover::from_json_file(name);
    }
    match name.replace('_', "-").as_str() {
        "wu-yang" | "polar" => Ok(CapCover::wu_yang()),
        "three-caps" => Ok(CapCover::three_caps()),
        "tetrahedral" | "tetra" => CapCover::tetrahedral(1.3),
        _ => Err(Error::invalid(format!(
            "cover {name:?} is neither a readable file nor a built-in cover"
        ))),
    }
}

fn curvature(config: &RunConfig) -> Result<PatchForm> {
    let builtin = Builtin::from_name(&config.form)?;
    let f = builtin.form(config.g)?;
    if f.degree() != 2 {
        return Err(Error::invalid(format!(
            "{} is not a curvature 2-form",
            config.form
        )));
    }
    Ok(f)
}

fn options(config: &RunConfig) -> QuantizeOptions {
    QuantizeOptions {
        sample_count: config.samples,
        seed: config.seed,
        ..Default::default()
    }
}

fn scaled(g: &Cochain, nerve: &Nerve, k: f64) -> Result<Cochain> {
    let CochainValues::Samples(fs) = g.values() else {
        return Err(Error::invalid("expected sampled transition functions"));
    };
    Cochain::new(
        nerve,
        g.degree(),
        CochainValues::Samples(fs.iter().map(|f| f.scaled(k)).collect()),
    )
}

/// Runs one command without writing anything.
pub fn execute(config: &RunConfig) -> Result<Outcome> {
    if !(config.tolerance > 0.0 && config.tolerance.is_finite()) {
        return Err(Error::invalid("--tolerance must be positive and finite"));
    }
    if !config.g.is_finite() || !config.q.is_finite() {
        return Err(Error::invalid("-G and -q must be finite"));
    }
    let tol = config.tolerance;
    match config.command {
        Command::Cover => {
            let cover = resolve_cover(config.cover.as_deref(), "three-caps")?;
            let coverage = validate_coverage(&cover, config.samples, config.seed)?;
            let n = nerve(
                &cover,
                cover.len().saturating_sub(1).max(1),
                config.samples,
                config.seed,
            )?;
            let figure = coverage_table(&coverage);
            let report = CoverCommandReport {
                cover: cover.to_spec(),
                coverage,
                nerve: n.to_json(),
                euler_characteristic: n.euler_characteristic(),
            };
            Ok(Outcome {
                report: Report::Cover(Box::new(report)),
                passed: true,
                figure,
            })
        }
        Command::Cohomology => {
            let cover = resolve_cover(config.cover.as_deref(), "three-caps")?;
            let tag = match config.coefficients {
                Some(Coefficients::Integer) => CoefficientTag::Integer,
                Some(Coefficients::Real) => CoefficientTag::Real,
                None => cover.coefficient_tag(),
            };
            let n = nerve(
                &cover,
                cover.len().saturating_sub(1).max(1),
                config.samples,
                config.seed,
            )?;
            let report = cohomology(&n, tag)?;
            Ok(Outcome {
                figure: betti_table(&report),
                report: Report::Cohomology(report),
                passed: true,
            })
        }
        Command::Quantize => {
            let cover = resolve_cover(config.cover.as_deref(), "three-caps")?;
            let qz = quantize_with(&curvature(config)?, &cover, config.q, tol, &options(config))?;
            let figure = match &qz.loop_transition {
                Some(lt) => winding_scan(lt, config.q),
                None => eta_scan(&qz.transitions, &qz.nerve)?,
            };
            Ok(Outcome {
                passed: qz.report.verdict.passed(),
                report: Report::Quantize(qz.report),
                figure,
            })
        }
        Command::Collate => {
            let cover = resolve_cover(config.cover.as_deref(), "three-caps")?;
            let f = curvature(config)?;
            let qz = quantize_with(&f, &cover, config.q, tol, &options(config))?;
            let partition = build_partition(&cover)?;
            let collated = collated_flux(
                &collate_to_form(&qz.transitions, &partition, &qz.nerve)?,
                COLLATED_FLUX_TOLERANCE,
            )?
            .value;
            let doubled = scaled(&qz.transitions, &qz.nerve, 2.0)?;
            let doubled_flux = collated_flux(
                &collate_to_form(&doubled, &partition, &qz.nerve)?,
                COLLATED_FLUX_TOLERANCE,
            )?
            .value;
            let total = qz.report.total_flux;
            let flux_error = (collated - total).abs();
            let linearity_error = (doubled_flux - 2.0 * collated).abs();
            let pass = flux_error < ROUND_TRIP_TOLERANCE && linearity_error < ROUND_TRIP_TOLERANCE;
            let report = CollateReport {
                g: f.constant(),
                q: config.q,
                tolerance: ROUND_TRIP_TOLERANCE,
                quantization_verdict: qz.report.verdict,
                total_flux: total,
                collated_flux: collated,
                flux_error,
                doubled_flux,
                linearity_error,
                verdict: verdict(pass),
            };
            let figure = summary_table(&[
                ("total_flux", total),
                ("collated_flux", collated),
                ("doubled_flux", doubled_flux),
                ("flux_error", flux_error),
                ("linearity_error", linearity_error),
            ]);
            Ok(Outcome {
                report: Report::Collate(report),
                passed: pass,
                figure,
            })
        }
        Command::Action => {
            let path = config
                .worldline
                .as_ref()
                .ok_or_else(|| Error::invalid("action needs --worldline"))?;
            let w = Worldline::from_json_file(path)?;
            let cover = resolve_cover(config.cover.as_deref(), "wu-yang")?;
            let qz = quantize_with(&curvature(config)?, &cover, config.q, tol, &options(config))?;
            let action = crate::worldline::evaluate_action(
                &w,
                &qz.primitives,
                &qz.transitions,
                &qz.nerve,
                config.q,
            )?;
            let sweep = switch_point_sweep(
                &w,
                &qz.primitives,
                &qz.transitions,
                &qz.nerve,
                config.q,
                config.trials,
                config.seed,
            )?;
            let pass = sweep.max_phase_deviation < tol && sweep.max_residual < tol;
            let figure = sweep_scan(&sweep);
            Ok(Outcome {
                report: Report::Action(ActionCommandReport {
                    tolerance: tol,
                    action,
                    sweep,
                    verdict: verdict(pass),
                }),
                passed: pass,
                figure,
            })
        }
        Command::Winding => {
            let cover = resolve_cover(config.cover.as_deref(), "wu-yang")?;
            let f = curvature(config)?;
            let qz = quantize_with(&f, &cover, config.q, tol, &options(config))?;
            let lt: LoopTransition = qz.loop_transition.ok_or_else(|| {
                Error::invalid("winding needs a cover of two patches meeting in an annulus")
            })?;
            let winding = qz.report.winding.unwrap_or_default();
            let chern_number = config.q * qz.report.total_flux / (2.0 * PI);
            let residual = qz.report.max_residual;
            let pass = residual < tol && (chern_number - winding as f64).abs() < tol;
            let figure = winding_scan(&lt, config.q);
            Ok(Outcome {
                report: Report::Winding(WindingReport {
                    g: f.constant(),
                    q: config.q,
                    tolerance: tol,
                    edge: lt.edge,
                    winding,
                    period: lt.period,
                    total_flux: qz.report.total_flux,
                    chern_number,
                    residual,
                    verdict: verdict(pass),
                }),
                passed: pass,
                figure,
            })
        }
        Command::DemoContradiction => {
            let demo = contradiction_demo(config.g)?;
            let expected = 4.0 * PI * config.g;
            let pass = demo.boundary_sum.abs() < tol && (demo.obstruction - expected).abs() < tol;
            let figure = summary_table(&[
                ("north_boundary", demo.north_boundary),
                ("south_boundary", demo.south_boundary),
                ("boundary_sum", demo.boundary_sum),
                ("flux", demo.flux),
                ("obstruction", demo.obstruction),
            ]);
            Ok(Outcome {
                report: Report::DemoContradiction(ContradictionCommandReport {
                    demo,
                    tolerance: tol,
                    verdict: verdict(pass),
                }),
                passed: pass,
                figure,
            })
        }
    }
}

/// Exit code for an error: 2 for bad input, 1 for failed scientific checks.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_)
        | Error::Domain(_)
        | Error::Coverage(_)
        | Error::InvalidWorldline(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::Csv(_) => EXIT_INVALID,
        Error::NonCocycle { .. }
        | Error::PathConstruction { .. }
        | Error::UndersampledLoop { .. }
        | Error::CocycleInconsistency(_)
        | Error::Internal(_) => EXIT_FAIL,
    }
}

fn write_report(report: &Report, output: Option<&Path>) -> Result<()> {
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    match output {
        Some(path) => std::fs::write(path, json)?,
        None => std::io::stdout().lock().write_all(json.as_bytes())?,
    }
    Ok(())
}

/// Runs a command, writes its report and plot data, and returns the exit code.
pub fn run(config: RunConfig) -> i32 {
    let outcome = match execute(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("cech-monopole: {e}");
            return exit_code(&e);
        }
    };
    let written = write_report(&outcome.report, config.output.as_deref()).and_then(|()| {
        match &config.figure_data {
            Some(path) => emit_figure_data(&outcome.figure, path),
            None => Ok(()),
        }
    });
    match written {
        Err(e) => {
            eprintln!("cech-monopole: {e}");
            EXIT_INVALID
        }
        Ok(()) if outcome.passed => EXIT_PASS,
        Ok(()) => EXIT_FAIL,
    }
}

/// Sizes the global thread pool from [`THREADS_ENV`].
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            Error::invalid(format!(
                "{THREADS_ENV} must be a positive integer, got {value:?}"
            ))
        })?;
    // a pool that already exists keeps its size
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Parses arguments and runs; the whole program.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("cech-monopole: {e}");
        return EXIT_INVALID;
    }
    run(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("cech-monopole").chain(args.iter().copied()))
            .unwrap()
    }

    #[test]
    fn parses_flags() {
        let c = config(&["quantize", "-G", "-1.5", "-q", "2", "--cover", "wu-yang"]);
        assert_eq!(c.command, Command::Quantize);
        assert_eq!((c.g, c.q, c.tolerance, c.seed), (-1.5, 2.0, 1e-8, 0));
        assert_eq!(
            config(&["demo-contradiction"]).command,
            Command::DemoContradiction
        );
        assert!(RunConfig::try_parse_from(["cech-monopole", "frobnicate"]).is_err());
    }

    #[test]
    fn bad_tolerance_is_invalid_input() {
        let e = execute(&config(&["demo-contradiction", "--tolerance", "-1"]))
            .err()
            .unwrap();
        assert_eq!(exit_code(&e), EXIT_INVALID);
    }

    #[test]
    fn contradiction_passes() {
        let o = execute(&config(&["demo-contradiction", "-G", "0.7"])).unwrap();
        assert!(o.passed);
    }

    #[test]
    fn unknown_cover_is_invalid() {
        assert!(resolve_cover(Some("no-such-cover"), "three-caps").is_err());
        assert_eq!(resolve_cover(None, "three-caps").unwrap().len(), 3);
    }
}
