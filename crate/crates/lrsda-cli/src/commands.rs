//! One function per subcommand. Scientific mismatches (claim vs enumeration)
//! are findings reported in the output, never process failures.

use std::path::Path;

use num_rational::Rational64;
use serde::Deserialize;
use serde_json::json;
use thiserror::Error;

use lrsda_core::coarray::{so_eca, weight_function};
use lrsda_core::doa::DoaError;
use lrsda_core::experiment::{
    best_lr_sda, dof_table as build_dof_table, redundancy_sweep as sweep_redundancy,
    uniform_angles, DoaPipeline, ExperimentError, SweepAxis, Verdict,
};
use lrsda_core::geometry::{
    build_lr_sda, claimed_dof, default_eta, select_delta, DofFormula, GeometryError, LrSdaParams,
};
use lrsda_core::reconstruction::{
    check_reconstruction, lr_sda_reconstruction, ReconstructionError,
};
use lrsda_core::SensorArray;

use crate::output::{design_notes, json_document, write_output, Csv, Format};
use crate::{
    ArrayKind, ArraySelection, CoarrayArgs, DoaSimArgs, GeometryArgs, OutputOptions,
    ReconstructionArgs, RedundancySweepArgs, RmseSweepArgs, SweepKind, TableArgs,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ReconstructionError> for CliError {
    fn from(e: ReconstructionError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Geometry(e) => CliError::Usage(e.to_string()),
            ExperimentError::Signal(e) => CliError::Usage(e.to_string()),
            ExperimentError::Doa(DoaError::Identifiability { requested, dim }) => CliError::Usage(
                format!("cannot resolve {requested} sources with smoothed dimension {dim}"),
            ),
            ExperimentError::Doa(e) => CliError::Internal(e.to_string()),
        }
    }
}

fn csv_cell(value: &str) -> String {
    if value.contains([',', '"', '\n']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

// ---------------------------------------------------------------------------
// array selection (flags, then config file, then command default)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ArrayConfig {
    LrSda {
        n: Option<u32>,
        n1: Option<u32>,
        n2: Option<u32>,
        eta: Option<u32>,
        delta: Option<u32>,
    },
    Custom {
        positions: Vec<i64>,
    },
}

pub struct ResolvedArray {
    pub array: SensorArray,
    pub params: Option<LrSdaParams>,
}

fn lr_sda_from_sizing(
    n: Option<u32>,
    n1: Option<u32>,
    n2: Option<u32>,
    eta: Option<u32>,
    delta: Option<u32>,
) -> Result<ResolvedArray, CliError> {
    let params = if let Some(n) = n {
        let (mut params, _) = best_lr_sda(n)?;
        if let Some(eta) = eta {
            params.eta = eta;
            let (best_delta, _) = select_delta(params.n1, params.n2, eta)?;
            params.delta = best_delta;
        }
        if let Some(delta) = delta {
            params.delta = delta;
        }
        params
    } else {
        let (n1, n2) = match (n1, n2) {
            (Some(n1), Some(n2)) => (n1, n2),
            _ => {
                return Err(CliError::Usage(
                    "lr-sda arrays need --n or both --n1 and --n2".into(),
                ))
            }
        };
        let eta = eta.unwrap_or_else(|| default_eta(n2));
        let delta = match delta {
            Some(d) => d,
            None => select_delta(n1, n2, eta)?.0,
        };
        LrSdaParams { n1, n2, eta, delta }
    };
    let array = build_lr_sda(&params)?;
    Ok(ResolvedArray {
        array,
        params: Some(params),
    })
}

fn resolve_array(
    sel: &ArraySelection,
    config: Option<&ArrayConfig>,
    default_n: Option<u32>,
) -> Result<ResolvedArray, CliError> {
    match sel.array {
        ArrayKind::Custom => {
            let positions = sel
                .positions
                .clone()
                .ok_or_else(|| CliError::Usage("--array custom needs --positions".into()))?;
            let array = SensorArray::new(positions, "custom")
                .map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(ResolvedArray {
                array,
                params: None,
            })
        }
        ArrayKind::LrSda if sel.positions.is_some() => Err(CliError::Usage(
            "--positions only applies to --array custom".into(),
        )),
        ArrayKind::LrSda => {
            if sel.n.is_some() || sel.n1.is_some() {
                return lr_sda_from_sizing(sel.n, sel.n1, sel.n2, sel.eta, sel.delta);
            }
            match config {
                Some(ArrayConfig::LrSda {
                    n,
                    n1,
                    n2,
                    eta,
                    delta,
                }) => lr_sda_from_sizing(*n, *n1, *n2, *eta, *delta),
                Some(ArrayConfig::Custom { positions }) => {
                    let array = SensorArray::new(positions.clone(), "custom")
                        .map_err(|e| CliError::Usage(e.to_string()))?;
                    Ok(ResolvedArray {
                        array,
                        params: None,
                    })
                }
                None => match default_n {
                    Some(n) => lr_sda_from_sizing(Some(n), None, None, sel.eta, sel.delta),
                    None => Err(CliError::Usage(
                        "specify an array: --n, --n1/--n2, or --array custom --positions".into(),
                    )),
                },
            }
        }
    }
}

// ---------------------------------------------------------------------------
// geometry
// ---------------------------------------------------------------------------

pub fn geometry(args: GeometryArgs) -> Result<(), CliError> {
    let resolved = resolve_array(&args.selection, None, None)?;
    let array = &resolved.array;
    let (_, summary) = so_eca(array);
    let format = args.output.format_or(Format::Csv);

    let claims: Option<Vec<(&str, i64)>> = resolved.params.map(|p| {
        vec![
            ("hole_free_span", claimed_dof(&p, DofFormula::HoleFreeSpan)),
            ("eta_one", claimed_dof(&p, DofFormula::EtaOne)),
            (
                "eta_at_least_two",
                claimed_dof(&p, DofFormula::EtaAtLeastTwo),
            ),
            (
                "quadratic_in_n2",
                claimed_dof(&p, DofFormula::QuadraticInN2),
            ),
        ]
    });

    match format {
        Format::Json => {
            let claims_json = match &claims {
                Some(c) => serde_json::Value::Object(
                    c.iter()
                        .map(|&(k, v)| (k.to_string(), serde_json::Value::from(v)))
                        .collect(),
                ),
                None => serde_json::Value::Null,
            };
            let value = json!({
                "label": array.label(),
                "positions": array.positions(),
                "subarrays": array.subarrays(),
                "params": resolved.params,
                "claimed_dof": claims_json,
                "verified": {"u": summary.u, "dof": summary.dof, "holes": summary.holes},
            });
            write_output(args.output.out.as_deref(), &json_document(&value))
        }
        Format::Csv => {
            let mut csv = Csv::new();
            csv.metadata(format!("array: {}", array.label()));
            if let Some(p) = resolved.params {
                csv.metadata(format!(
                    "params: n1={} n2={} eta={} delta={}",
                    p.n1, p.n2, p.eta, p.delta
                ));
            }
            if let Some(claims) = &claims {
                let rendered: Vec<String> =
                    claims.iter().map(|(k, v)| format!("{k}={v}")).collect();
                csv.metadata(format!("claimed_dof: {}", rendered.join(" ")));
            }
            csv.metadata(format!(
                "verified: u={} dof={} holes={:?}",
                summary.u, summary.dof, summary.holes
            ));
            csv.header("index,position_d,subarray");
            let subarray_of = |p: i64| -> &'static str {
                match array.subarrays() {
                    Some(subs) => {
                        if subs.first.contains(&p) {
                            "1"
                        } else if subs.second.contains(&p) {
                            "2"
                        } else {
                            "3"
                        }
                    }
                    None => "-",
                }
            };
            for (i, &p) in array.positions().iter().enumerate() {
                csv.row(&[i.to_string(), p.to_string(), subarray_of(p).to_string()]);
            }
            write_output(args.output.out.as_deref(), &csv.finish())
        }
    }
}

// ---------------------------------------------------------------------------
// coarray
// ---------------------------------------------------------------------------

pub fn coarray(args: CoarrayArgs) -> Result<(), CliError> {
    let resolved = resolve_array(&args.selection, None, None)?;
    let array = &resolved.array;
    let (_, summary) = so_eca(array);
    let weights = weight_function(array);

    match args.output.format_or(Format::Csv) {
        Format::Json => {
            let value = json!({
                "label": array.label(),
                "positions": array.positions(),
                "u": summary.u,
                "dof": summary.dof,
                "holes": summary.holes,
                "weights": weights.weights.iter()
                    .map(|(&lag, &m)| json!({"lag": lag, "weight": m}))
                    .collect::<Vec<_>>(),
            });
            write_output(args.output.out.as_deref(), &json_document(&value))
        }
        Format::Csv => {
            let mut csv = Csv::new();
            csv.metadata(format!("array: {}", array.label()));
            csv.metadata(format!("positions: {:?}", array.positions()));
            csv.metadata(format!(
                "verified: u={} dof={} holes={:?}",
                summary.u, summary.dof, summary.holes
            ));
            csv.header("lag,weight");
            for (&lag, &m) in &weights.weights {
                csv.row(&[lag.to_string(), m.to_string()]);
            }
            write_output(args.output.out.as_deref(), &csv.finish())
        }
    }
}

// ---------------------------------------------------------------------------
// dof-table
// ---------------------------------------------------------------------------

pub fn dof_table(args: TableArgs) -> Result<(), CliError> {
    let report = build_dof_table()?;
    match args.output.format_or(Format::Csv) {
        Format::Json => {
            let value =
                serde_json::to_value(&report).map_err(|e| CliError::Internal(e.to_string()))?;
            write_output(args.output.out.as_deref(), &json_document(&value))
        }
        Format::Csv => {
            let mut csv = Csv::new();
            csv.metadata("claimed values from the closed-form catalog; verified by enumeration");
            csv.header(
                "structure,sizing,sensors,claimed_dof,formula_dof,verified_dof,best_effort,note",
            );
            for row in &report.rows {
                csv.row(&[
                    row.structure.clone(),
                    csv_cell(&row.sizing),
                    row.sensors.to_string(),
                    row.claimed_dof.to_string(),
                    row.formula_dof.to_string(),
                    row.verified_dof.map_or_else(String::new, |v| v.to_string()),
                    row.best_effort.to_string(),
                    csv_cell(row.note.as_deref().unwrap_or("")),
                ]);
            }
            for record in &report.records {
                let verdict = match record.verdict {
                    Verdict::Match => "match",
                    Verdict::Mismatch => "mismatch",
                };
                csv.metadata(format!(
                    "discrepancy: source={} array=\"{}\" claimed={} computed={} verdict={}",
                    record.source, record.array, record.claimed, record.computed, verdict
                ));
            }
            write_output(args.output.out.as_deref(), &csv.finish())
        }
    }
}

// ---------------------------------------------------------------------------
// redundancy-sweep
// ---------------------------------------------------------------------------

pub fn redundancy_sweep(args: RedundancySweepArgs) -> Result<(), CliError> {
    if args.n_min < 2 || args.n_max < args.n_min {
        return Err(CliError::Usage("need 2 <= n-min <= n-max".into()));
    }
    let rows = sweep_redundancy(args.n_min, args.n_max)?;
    match args.output.format_or(Format::Csv) {
        Format::Json => {
            let value =
                serde_json::to_value(&rows).map_err(|e| CliError::Internal(e.to_string()))?;
            write_output(args.output.out.as_deref(), &json_document(&value))
        }
        Format::Csv => {
            let mut csv = Csv::new();
            for note in design_notes() {
                csv.metadata(note);
            }
            csv.header(
                "sensors,n1,n2,eta,delta,u,redundancy,exact,lower_bound,within_claimed_band,above_lower_bound",
            );
            for row in &rows {
                csv.row(&[
                    row.sensors.to_string(),
                    row.params.n1.to_string(),
                    row.params.n2.to_string(),
                    row.params.eta.to_string(),
                    row.params.delta.to_string(),
                    row.u.to_string(),
                    format!("{}", row.redundancy),
                    row.exact.clone(),
                    format!("{}", row.lower_bound),
                    row.within_claimed_band.to_string(),
                    row.above_lower_bound.to_string(),
                ]);
            }
            write_output(args.output.out.as_deref(), &csv.finish())
        }
    }
}

// ---------------------------------------------------------------------------
// doa-sim / rmse-sweep configuration plumbing
// ---------------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    kind: Option<String>,
    array: Option<ArrayConfig>,
    angles_deg: Option<Vec<f64>>,
    sources: Option<usize>,
    snr_db: Option<f64>,
    snapshots: Option<usize>,
    sweep: Option<SweepConfig>,
    trials: Option<usize>,
    seed: Option<u64>,
    out: Option<std::path::PathBuf>,
    format: Option<Format>,
    grid_step_deg: Option<f64>,
    source_power: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepConfig {
    axis: SweepKind,
    values: Vec<f64>,
}

fn load_config(path: Option<&Path>, expected_kind: &str) -> Result<ConfigFile, CliError> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let config: ConfigFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
    if let Some(kind) = &config.kind {
        if kind != expected_kind {
            return Err(CliError::Usage(format!(
                "config kind '{kind}' does not match subcommand '{expected_kind}'"
            )));
        }
    }
    Ok(config)
}

fn resolve_output(
    cli: &OutputOptions,
    config: &ConfigFile,
    default: Format,
) -> (Option<std::path::PathBuf>, Format) {
    let out = cli.out.clone().or_else(|| config.out.clone());
    let format = cli.format.or(config.format).unwrap_or(default);
    (out, format)
}

impl OutputOptions {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

fn positive_integer_values(values: &[f64], what: &str) -> Result<Vec<usize>, CliError> {
    values
        .iter()
        .map(|&v| {
            if v.fract() == 0.0 && v >= 1.0 && v <= usize::MAX as f64 {
                Ok(v as usize)
            } else {
                Err(CliError::Usage(format!(
                    "{what} values must be positive integers, got {v}"
                )))
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// doa-sim
// ---------------------------------------------------------------------------

pub fn doa_sim(args: DoaSimArgs) -> Result<(), CliError> {
    let config = load_config(args.config.as_deref(), "doa-sim")?;
    let resolved = resolve_array(&args.selection, config.array.as_ref(), Some(11))?;
    let angles = match args.angles.or(config.angles_deg.clone()) {
        Some(angles) => angles,
        None => {
            let d = args.sources.or(config.sources).unwrap_or(20);
            uniform_angles(d, -60.0, 60.0)
        }
    };
    let snr_db = args.snr.or(config.snr_db).unwrap_or(0.0);
    let snapshots = args.snapshots.or(config.snapshots).unwrap_or(10_000);
    let seed = args.seed.or(config.seed).unwrap_or(1);
    let grid_step = args.grid_step.or(config.grid_step_deg).unwrap_or(0.05);
    let power = args.power.or(config.source_power).unwrap_or(1.0);
    let (out, format) = resolve_output(&args.output, &config, Format::Csv);

    let mut pipeline = DoaPipeline::new(resolved.array.clone(), angles.clone(), snr_db, snapshots);
    pipeline.grid_step_deg = grid_step;
    pipeline.source_power = power;
    let result = pipeline.run_with_spectrum(seed)?;

    match format {
        Format::Json => {
            let value = json!({
                "array": resolved.array.label(),
                "positions": resolved.array.positions(),
                "angles_deg": angles,
                "snr_db": snr_db,
                "snapshots": snapshots,
                "seed": seed,
                "grid_step_deg": grid_step,
                "source_power": power,
                "estimates_deg": result.estimates,
                "under_resolution": result.under_resolution,
                "spectrum": result.spectrum,
            });
            write_output(out.as_deref(), &json_document(&value))
        }
        Format::Csv => {
            let mut csv = Csv::new();
            csv.metadata(format!("array: {}", resolved.array.label()));
            csv.metadata(format!("positions: {:?}", resolved.array.positions()));
            csv.metadata(format!(
                "angles_deg: {angles:?} snr_db: {snr_db} snapshots: {snapshots} seed: {seed} grid_step_deg: {grid_step} source_power: {power}"
            ));
            for note in design_notes() {
                csv.metadata(note);
            }
            match (&result.estimates, &result.under_resolution) {
                (Some(estimates), _) => {
                    let rendered: Vec<String> =
                        estimates.iter().map(|e| format!("{e:.4}")).collect();
                    csv.metadata(format!("estimates_deg: [{}]", rendered.join(", ")));
                }
                (None, Some(notice)) => {
                    csv.metadata(format!("under_resolution: {notice}"));
                }
                (None, None) => {}
            }
            csv.header("angle_deg,pseudospectrum");
            for (theta, value) in result.spectrum.grid_deg.iter().zip(&result.spectrum.values) {
                csv.row(&[format!("{theta:.6}"), format!("{value}")]);
            }
            write_output(out.as_deref(), &csv.finish())
        }
    }
}

// ---------------------------------------------------------------------------
// rmse-sweep
// ---------------------------------------------------------------------------

pub fn rmse_sweep(args: RmseSweepArgs) -> Result<(), CliError> {
    let config = load_config(args.config.as_deref(), "rmse-sweep")?;
    let resolved = resolve_array(&args.selection, config.array.as_ref(), Some(11))?;

    let (config_kind, config_values) = match config.sweep {
        Some(ref sweep) => (Some(sweep.axis), Some(sweep.values.clone())),
        None => (None, None),
    };
    let kind = args.sweep.or(config_kind).unwrap_or(SweepKind::Snr);
    let values: Vec<f64> = match args.values.or(config_values) {
        Some(values) if !values.is_empty() => values,
        Some(_) => return Err(CliError::Usage("sweep values must be non-empty".into())),
        None => match kind {
            SweepKind::Snr => (-5..=5).map(|i| (2 * i) as f64).collect(),
            SweepKind::Snapshots => (4..=9).map(|i| (2000 * i) as f64).collect(),
            SweepKind::Sources => (5..=10).map(|i| (2 * i) as f64).collect(),
        },
    };
    let sources = args.sources.or(config.sources).unwrap_or(12);
    let snr_db = args.snr.or(config.snr_db).unwrap_or(2.0);
    let snapshots = args.snapshots.or(config.snapshots).unwrap_or(12_000);
    let trials = args.trials.or(config.trials).unwrap_or(50);
    let seed = args.seed.or(config.seed).unwrap_or(1);
    let grid_step = args.grid_step.or(config.grid_step_deg).unwrap_or(0.05);
    let power = args.power.or(config.source_power).unwrap_or(1.0);
    let (out, format) = resolve_output(&args.output, &config, Format::Csv);
    if trials == 0 {
        return Err(CliError::Usage("need at least one trial".into()));
    }

    let axis = match kind {
        SweepKind::Snr => SweepAxis::SnrDb(values.clone()),
        SweepKind::Snapshots => SweepAxis::Snapshots(positive_integer_values(&values, "snapshot")?),
        SweepKind::Sources => SweepAxis::SourceCount(positive_integer_values(&values, "source")?),
    };

    let base_angles = match config.angles_deg {
        Some(ref angles) => angles.clone(),
        None => uniform_angles(sources, -60.0, 60.0),
    };
    let mut base = DoaPipeline::new(resolved.array.clone(), base_angles, snr_db, snapshots);
    base.grid_step_deg = grid_step;
    base.source_power = power;

    let points = lrsda_core::experiment::rmse_sweep(&base, &axis, trials, seed)?;

    match format {
        Format::Json => {
            let value = json!({
                "array": resolved.array.label(),
                "axis": axis.name(),
                "trials": trials,
                "seed": seed,
                "snr_db": snr_db,
                "snapshots": snapshots,
                "sources": sources,
                "grid_step_deg": grid_step,
                "points": points,
            });
            write_output(out.as_deref(), &json_document(&value))
        }
        Format::Csv => {
            let mut csv = Csv::new();
            csv.metadata(format!("array: {}", resolved.array.label()));
            csv.metadata(format!(
                "axis: {} trials: {trials} seed: {seed} snr_db: {snr_db} snapshots: {snapshots} sources: {sources} grid_step_deg: {grid_step}",
                axis.name()
            ));
            for note in design_notes() {
                csv.metadata(note);
            }
            csv.header(&format!(
                "{},rmse_deg,used_trials,excluded_trials",
                axis.name()
            ));
            for point in &points {
                csv.row(&[
                    format!("{}", point.axis_value),
                    point
                        .outcome
                        .rmse_deg
                        .map_or_else(|| "nan".into(), |v| format!("{v}")),
                    point.outcome.used_trials.to_string(),
                    point.outcome.excluded_trials.to_string(),
                ]);
            }
            write_output(out.as_deref(), &csv.finish())
        }
    }
}

// ---------------------------------------------------------------------------
// reconstruction
// ---------------------------------------------------------------------------

pub fn reconstruction(args: ReconstructionArgs) -> Result<(), CliError> {
    let resolved = resolve_array(&args.selection, None, None)?;
    let lambda_over_d = Rational64::new(2, 1);

    let value = match resolved.params {
        Some(params) => {
            let report = lr_sda_reconstruction(&params, lambda_over_d)?;
            json!({
                "params": params,
                "positions": report.positions,
                "lambda_over_d": "2",
                "ambiguity": {
                    "lcm_value": report.ambiguity.lcm_value.to_string(),
                    "passes": report.ambiguity.passes,
                    "zero_positions_excluded": report.ambiguity.zero_positions_excluded,
                },
                "degenerate": report.degenerate,
                "lcm1": report.lcm1.map(|v| v.to_string()),
                "lcm2": report.lcm2.map(|b| json!({
                    "product": b.product.to_string(),
                    "true_lcm": b.true_lcm.to_string(),
                })),
                "lcm3": report.lcm3.map(|b| json!({
                    "product": b.product.to_string(),
                    "true_lcm": b.true_lcm.to_string(),
                })),
                "combined_lcm": report.combined_lcm.map(|v| v.to_string()),
                "combined_true_lcm": report.combined_true_lcm.map(|v| v.to_string()),
                "min_k": report.min_k.map(|v| v.to_string()),
                "coefficients": report.coefficients.map(|cs| {
                    cs.iter().map(|c| c.to_string()).collect::<Vec<_>>()
                }),
            })
        }
        None => {
            let check = check_reconstruction(&resolved.array, lambda_over_d)?;
            json!({
                "positions": resolved.array.positions(),
                "lambda_over_d": "2",
                "ambiguity": {
                    "lcm_value": check.lcm_value.to_string(),
                    "passes": check.passes,
                    "zero_positions_excluded": check.zero_positions_excluded,
                },
            })
        }
    };

    match args.output.format_or(Format::Json) {
        Format::Json => write_output(args.output.out.as_deref(), &json_document(&value)),
        Format::Csv => {
            // flatten to key,value rows for spreadsheet use
            let mut csv = Csv::new();
            csv.header("key,value");
            let object = value.as_object().expect("report is an object");
            for (key, val) in object {
                csv.row(&[key.clone(), csv_cell(&val.to_string())]);
            }
            write_output(args.output.out.as_deref(), &csv.finish())
        }
    }
}
