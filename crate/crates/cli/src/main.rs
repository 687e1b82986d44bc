//! Command-line front end for the channel toolkit: classification, canonical
//! forms, dilations, key rates, threshold sweeps, Monte Carlo validation,
//! and the cloner equivalence, with CSV/JSON/SVG output.
//!
//! Every successful run emits a manifest (command, parameters, version,
//! seed, timestamp) alongside its data; given equal parameters the data
//! section is byte-identical across reruns. Errors are structured JSON on
//! stdout with exit code 2 (invalid input), 3 (numeric failure), or 1 (IO).

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cvchan::nalgebra::{DMatrix, Matrix2, Vector2};
use cvchan::{
    canonical_form, classify, disturbance_product, invariants_of, ogc_equivalent_of,
    physical_representation, rate_report, threshold_sweep, tmsv_purification,
    validate_against_closed_form, AttackParams, ChannelInvariants, GaussianChannel, Quadrature,
    SimConfig, SweepRow,
};

#[derive(Parser)]
#[command(
    name = "cvchan",
    version,
    about = "One-mode Gaussian channel classification, dilation, and key-rate analysis"
)]
struct Cli {
    /// Write the output to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a channel given by its transmission and noise matrices.
    Classify(ClassifyArgs),
    /// Canonical form for a triple of invariants (tau, rank, nbar).
    CanonicalForm(InvariantsArgs),
    /// Two-mode dilation of a regular canonical form.
    Dilation(DilationArgs),
    /// Key rates and variances for an individual attack.
    Keyrate(KeyrateArgs),
    /// Security thresholds over a transmission grid.
    Threshold(ThresholdArgs),
    /// Monte Carlo validation of the closed forms.
    Validate(ValidateArgs),
    /// Cloning machine equivalent to an attack in direct reconciliation.
    ClonerEquiv(ClonerEquivArgs),
}

#[derive(clap::Args)]
struct ClassifyArgs {
    /// Transmission matrix, row-major: t11,t12,t21,t22.
    #[arg(long, allow_hyphen_values = true)]
    t: String,
    /// Noise matrix upper triangle: n11,n12,n22 (completed symmetrically).
    #[arg(long, allow_hyphen_values = true)]
    n: String,
    /// Displacement: d1,d2.
    #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
    d: String,
}

#[derive(clap::Args)]
struct InvariantsArgs {
    #[arg(long, allow_negative_numbers = true)]
    tau: f64,
    /// Rank invariant: 0, 1, or 2.
    #[arg(long)]
    rank: u8,
    #[arg(long, default_value_t = 0.0)]
    nbar: f64,
}

#[derive(clap::Args)]
struct DilationArgs {
    #[arg(long, allow_negative_numbers = true)]
    tau: f64,
    #[arg(long, default_value_t = 0.0)]
    nbar: f64,
}

#[derive(clap::Args)]
struct KeyrateArgs {
    #[arg(long, allow_negative_numbers = true)]
    tau: f64,
    #[arg(long)]
    omega: f64,
    /// Modulation variance; omit for the high-modulation limit.
    #[arg(long)]
    mu: Option<f64>,
}

#[derive(clap::Args)]
struct ThresholdArgs {
    #[arg(long, allow_negative_numbers = true)]
    tau_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    tau_max: f64,
    #[arg(long)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(clap::Args)]
struct ValidateArgs {
    /// Single-point run: requires --omega and --mu as well.
    #[arg(long, allow_negative_numbers = true)]
    tau: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// JSON file with an array of {"tau", "omega", "mu"} points.
    #[arg(long)]
    grid_file: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "q", value_parser = parse_quadrature)]
    quadrature: Quadrature,
}

#[derive(clap::Args)]
struct ClonerEquivArgs {
    #[arg(long, allow_negative_numbers = true)]
    tau: f64,
    #[arg(long)]
    omega: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

fn parse_quadrature(s: &str) -> Result<Quadrature, String> {
    Quadrature::from_str(s).map_err(|e| e.to_string())
}

struct CliError {
    kind: &'static str,
    message: String,
    code: u8,
}

impl CliError {
    fn invalid(message: String) -> Self {
        CliError { kind: "invalid-params", message, code: 2 }
    }

    fn io(e: std::io::Error) -> Self {
        CliError { kind: "io", message: e.to_string(), code: 1 }
    }
}

impl From<cvchan::Error> for CliError {
    fn from(e: cvchan::Error) -> Self {
        use cvchan::Error::*;
        let (kind, code) = match e {
            NotSymmetric { .. } => ("not-symmetric", 2),
            NotPositiveSemidefinite { .. } => ("not-positive-semidefinite", 2),
            Unphysical { .. } => ("unphysical-state", 2),
            NotSymplectic { .. } => ("not-symplectic", 2),
            InvalidChannel { .. } => ("invalid-channel", 2),
            DimensionMismatch { .. } => ("dimension-mismatch", 2),
            NotSingleMode { .. } => ("not-single-mode", 2),
            BadModeIndex { .. } => ("bad-mode-index", 2),
            SingularConditioning { .. } => ("singular-conditioning", 3),
            SingularTransmission { .. } => ("singular-transmission", 2),
            Unclassifiable { .. } => ("unclassifiable", 3),
            InvalidInvariants { .. } => ("invalid-invariants", 2),
            UnsupportedClass { .. } => ("unsupported-class", 2),
            InvalidParams { .. } => ("invalid-params", 2),
            DegenerateCovariate => ("degenerate-covariate", 3),
            InsufficientSamples { .. } => ("insufficient-samples", 2),
            InfiniteInformation { .. } => ("infinite-information", 3),
        };
        CliError { kind, message: e.to_string(), code }
    }
}

fn manifest(command: &str, params: Value, seed: Option<u64>) -> Value {
    let unix_time = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or_default();
    json!({
        "command": command,
        "params": params,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "unix_time": unix_time,
    })
}

fn json_envelope(manifest: Value, data: Value) -> String {
    let doc = json!({ "manifest": manifest, "data": data });
    let mut out = serde_json::to_string_pretty(&doc).expect("serializable document");
    out.push('\n');
    out
}

fn parse_reals(flag: &str, raw: &str, expect: usize) -> Result<Vec<f64>, CliError> {
    let vals: Result<Vec<f64>, _> = raw.split(',').map(|p| p.trim().parse::<f64>()).collect();
    let vals = vals
        .map_err(|e| CliError::invalid(format!("--{flag}: cannot parse '{raw}' as reals: {e}")))?;
    if vals.len() != expect {
        return Err(CliError::invalid(format!(
            "--{flag}: expected {expect} comma-separated reals, got {}",
            vals.len()
        )));
    }
    Ok(vals)
}

fn matrix2_rows(m: &Matrix2<f64>) -> Value {
    json!([[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]])
}

fn dmatrix_rows(m: &DMatrix<f64>) -> Value {
    let rows: Vec<Vec<f64>> =
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect();
    json!(rows)
}

fn invariants_json(inv: &ChannelInvariants) -> Value {
    json!({ "tau": inv.tau(), "rank": inv.rank_r(), "nbar": inv.nbar() })
}

fn run_classify(args: &ClassifyArgs) -> Result<(String, u8), CliError> {
    let t = parse_reals("t", &args.t, 4)?;
    let n = parse_reals("n", &args.n, 3)?;
    let d = parse_reals("d", &args.d, 2)?;
    let t = Matrix2::new(t[0], t[1], t[2], t[3]);
    let n = Matrix2::new(n[0], n[1], n[1], n[2]);
    let d = Vector2::new(d[0], d[1]);

    let validity = GaussianChannel::check(&t, &n);
    let channel = GaussianChannel::new(t, n, d)?;
    let inv = invariants_of(&channel)?;
    let class = classify(&channel)?;
    let form = canonical_form(&inv);

    let params = json!({ "t": args.t, "n": args.n, "d": args.d });
    let data = json!({
        "validity": validity,
        "invariants": invariants_json(&inv),
        "class": class.label(),
        "canonical": { "tc": matrix2_rows(form.tc()), "nc": matrix2_rows(form.nc()) },
    });
    Ok((json_envelope(manifest("classify", params, None), data), 0))
}

fn run_canonical_form(args: &InvariantsArgs) -> Result<(String, u8), CliError> {
    let inv = ChannelInvariants::new(args.tau, args.rank, args.nbar)?;
    let form = canonical_form(&inv);
    let params = json!({ "tau": args.tau, "rank": args.rank, "nbar": args.nbar });
    let data = json!({
        "class": form.class().label(),
        "invariants": invariants_json(form.invariants()),
        "tc": matrix2_rows(form.tc()),
        "nc": matrix2_rows(form.nc()),
        "regular": form.is_regular(),
    });
    Ok((json_envelope(manifest("canonical-form", params, None), data), 0))
}

fn run_dilation(args: &DilationArgs) -> Result<(String, u8), CliError> {
    let inv = ChannelInvariants::new(args.tau, 2, args.nbar)?;
    let form = canonical_form(&inv);
    let rep = physical_representation(&form)?;
    let pur = tmsv_purification(&form)?;
    let params = json!({ "tau": args.tau, "nbar": args.nbar });
    let data = json!({
        "class": form.class().label(),
        "tau": rep.tau(),
        "nbar": rep.nbar(),
        "interaction": dmatrix_rows(rep.interaction().matrix()),
        "environment": {
            "kind": "thermal",
            "nbar": rep.nbar(),
            "cov": dmatrix_rows(rep.environment().cov().matrix()),
        },
        "purification": { "kind": "tmsv", "omega": pur.omega() },
        "strongly_antidegradable": cvchan::is_strongly_antidegradable(&form)?,
        "weakly_degradable": cvchan::is_weakly_degradable(&form)?,
    });
    Ok((json_envelope(manifest("dilation", params, None), data), 0))
}

fn run_keyrate(args: &KeyrateArgs) -> Result<(String, u8), CliError> {
    let mu = args.mu.unwrap_or(f64::INFINITY);
    let attack = AttackParams::new(args.tau, args.omega, mu)?;
    let report = rate_report(&attack)?;
    let params = json!({ "tau": args.tau, "omega": args.omega, "mu": args.mu });
    let data = serde_json::to_value(report).expect("serializable report");
    Ok((json_envelope(manifest("keyrate", params, None), data), 0))
}

fn tau_grid(args: &ThresholdArgs) -> Result<Vec<f64>, CliError> {
    if !args.tau_min.is_finite() || !args.tau_max.is_finite() || args.tau_min > args.tau_max {
        return Err(CliError::invalid(format!(
            "degenerate range [{}, {}]",
            args.tau_min, args.tau_max
        )));
    }
    match args.steps {
        0 => Err(CliError::invalid("steps must be at least 1".into())),
        1 if args.tau_min != args.tau_max => {
            Err(CliError::invalid("steps = 1 needs tau-min = tau-max".into()))
        }
        1 => Ok(vec![args.tau_min]),
        steps => {
            let span = args.tau_max - args.tau_min;
            Ok((0..steps)
                .map(|i| args.tau_min + span * (i as f64) / ((steps - 1) as f64))
                .collect())
        }
    }
}

fn render_threshold_csv(manifest: &Value, rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!("# manifest: {manifest}\n"));
    out.push_str("tau,eps_dr,eps_rr\n");
    for row in rows {
        match row {
            SweepRow::Excluded { tau, .. } => {
                out.push_str(&format!("{tau},excluded,excluded\n"));
            }
            SweepRow::Thresholds { tau, eps_dr, eps_rr } => {
                out.push_str(&format!("{tau},{eps_dr},{eps_rr}\n"));
            }
        }
    }
    out
}

fn render_threshold_svg(manifest: &Value, rows: &[SweepRow]) -> String {
    const W: f64 = 720.0;
    const H: f64 = 480.0;
    const ML: f64 = 60.0;
    const MR: f64 = 20.0;
    const MT: f64 = 20.0;
    const MB: f64 = 50.0;
    let plot_w = W - ML - MR;
    let plot_h = H - MT - MB;

    let taus: Vec<f64> = rows.iter().map(|r| r.tau()).collect();
    let (x_min, x_max) = taus
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| (lo.min(t), hi.max(t)));
    let x_span = if x_max > x_min { x_max - x_min } else { 1.0 };
    let y_peak = rows
        .iter()
        .filter_map(|r| r.thresholds())
        .map(|(dr, rr)| dr.max(rr))
        .fold(0.25_f64, f64::max);
    let y_max = (y_peak / 0.25).ceil() * 0.25;

    let x_px = |tau: f64| ML + (tau - x_min) / x_span * plot_w;
    let y_px = |eps: f64| MT + (1.0 - eps / y_max) * plot_h;

    // Runs of consecutive threshold rows; excluded rows split the curves.
    let mut segments: Vec<Vec<(f64, f64, f64)>> = vec![Vec::new()];
    for row in rows {
        match row.thresholds() {
            Some((dr, rr)) => segments.last_mut().unwrap().push((row.tau(), dr, rr)),
            None => {
                if !segments.last().unwrap().is_empty() {
                    segments.push(Vec::new());
                }
            }
        }
    }
    segments.retain(|s| !s.is_empty());

    let mut svg = String::new();
    svg.push_str(&format!("<!-- manifest: {manifest} -->\n"));
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{ML}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - MB,
        W - MR,
        H - MB
    ));
    svg.push_str(&format!(
        "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - MB
    ));

    // Ticks every 0.25 on both axes.
    let mut tick = (x_min / 0.25).ceil() * 0.25;
    while tick <= x_max + 1e-12 {
        let x = x_px(tick);
        svg.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{}\" x2=\"{x:.2}\" y2=\"{}\" stroke=\"black\"/>\n",
            H - MB,
            H - MB + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{tick:.2}</text>\n",
            H - MB + 18.0
        ));
        tick += 0.25;
    }
    let mut tick = 0.0;
    while tick <= y_max + 1e-12 {
        let y = y_px(tick);
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{y:.2}\" x2=\"{ML}\" y2=\"{y:.2}\" stroke=\"black\"/>\n",
            ML - 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{tick:.2}</text>\n",
            ML - 8.0,
            y + 4.0
        ));
        tick += 0.25;
    }
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">transmission \
         tau</text>\n",
        ML + plot_w / 2.0,
        H - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"14\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" \
         transform=\"rotate(-90 14 {:.2})\">max tolerable excess noise</text>\n",
        MT + plot_h / 2.0,
        MT + plot_h / 2.0
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"11\">thin: direct reconciliation, thick: reverse \
         reconciliation</text>\n",
        ML + 10.0,
        MT + 14.0
    ));

    // Thin DR curve, thick RR curve, one polyline per unbroken run.
    for (width, pick) in [(1.0, 0usize), (3.0, 1usize)] {
        for seg in &segments {
            let points: Vec<String> = seg
                .iter()
                .map(|&(tau, dr, rr)| {
                    let eps = if pick == 0 { dr } else { rr };
                    format!("{:.2},{:.2}", x_px(tau), y_px(eps))
                })
                .collect();
            svg.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"{width}\" \
                 points=\"{}\"/>\n",
                points.join(" ")
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn run_threshold(args: &ThresholdArgs) -> Result<(String, u8), CliError> {
    let grid = tau_grid(args)?;
    let rows = threshold_sweep(&grid);
    let format_name = match args.format {
        Format::Csv => "csv",
        Format::Json => "json",
        Format::Svg => "svg",
    };
    let params = json!({
        "tau_min": args.tau_min,
        "tau_max": args.tau_max,
        "steps": args.steps,
        "format": format_name,
    });
    let m = manifest("threshold", params, None);
    let content = match args.format {
        Format::Csv => render_threshold_csv(&m, &rows),
        Format::Svg => render_threshold_svg(&m, &rows),
        Format::Json => json_envelope(m, json!({ "rows": rows })),
    };
    Ok((content, 0))
}

#[derive(serde::Deserialize)]
struct GridPoint {
    tau: f64,
    omega: f64,
    mu: f64,
}

fn validate_points(args: &ValidateArgs) -> Result<Vec<GridPoint>, CliError> {
    match (args.tau, args.omega, args.mu, &args.grid_file) {
        (Some(tau), Some(omega), Some(mu), None) => Ok(vec![GridPoint { tau, omega, mu }]),
        (None, None, None, Some(path)) => {
            let raw = std::fs::read_to_string(path).map_err(CliError::io)?;
            serde_json::from_str(&raw).map_err(|e| {
                CliError::invalid(format!("--grid-file {}: {e}", path.display()))
            })
        }
        (None, None, None, None) => {
            // Default grid: attenuating, amplifying, and transmission-
            // reversing attacks at several probe and modulation strengths.
            let mut points = Vec::new();
            for tau in [-1.0, 0.5, 2.0] {
                for omega in [1.0, 1.5, 3.0] {
                    for mu in [4.0, 8.0] {
                        points.push(GridPoint { tau, omega, mu });
                    }
                }
            }
            Ok(points)
        }
        _ => Err(CliError::invalid(
            "give all of --tau/--omega/--mu, or --grid-file, or neither for the default grid"
                .into(),
        )),
    }
}

fn run_validate(args: &ValidateArgs) -> Result<(String, u8), CliError> {
    let points = validate_points(args)?;
    let mut runs = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let attack = AttackParams::new(p.tau, p.omega, p.mu)?;
        // Decorrelate grid points by a fixed stride in seed space; each
        // run's record echoes the seed it actually used.
        let seed = args.seed.wrapping_add((i as u64).wrapping_mul(0x9E3779B97F4A7C15));
        let cfg = SimConfig::new(attack, args.samples, seed, args.quadrature)?;
        runs.push(validate_against_closed_form(&cfg)?);
    }
    let all_pass = runs.iter().all(|r| r.all_pass);
    let params = json!({
        "tau": args.tau,
        "omega": args.omega,
        "mu": args.mu,
        "grid_file": args.grid_file.as_ref().map(|p| p.display().to_string()),
        "samples": args.samples,
        "seed": args.seed,
        "quadrature": args.quadrature.to_string(),
    });
    let data = json!({
        "rng_algorithm": cvchan::mc::RNG_ALGORITHM,
        "z_limit": cvchan::mc::Z_LIMIT,
        "runs": runs,
        "all_pass": all_pass,
    });
    let code = if all_pass { 0 } else { 3 };
    Ok((json_envelope(manifest("validate", params, Some(args.seed)), data), code))
}

fn run_cloner_equiv(args: &ClonerEquivArgs) -> Result<(String, u8), CliError> {
    let attack = AttackParams::asymptotic(args.tau, args.omega)?;
    let machine = ogc_equivalent_of(&attack);
    let params = json!({ "tau": args.tau, "omega": args.omega });
    let data = json!({
        "tau": args.tau,
        "omega": args.omega,
        "chi": attack.chi(),
        "chi_b": machine.chi_b(),
        "chi_c": machine.chi_c(),
        "disturbance_product": disturbance_product(&machine),
        "context": "additive equivalent for direct reconciliation at high modulation",
    });
    Ok((json_envelope(manifest("cloner-equiv", params, None), data), 0))
}

fn dispatch(command: &Command) -> Result<(String, u8), CliError> {
    match command {
        Command::Classify(a) => run_classify(a),
        Command::CanonicalForm(a) => run_canonical_form(a),
        Command::Dilation(a) => run_dilation(a),
        Command::Keyrate(a) => run_keyrate(a),
        Command::Threshold(a) => run_threshold(a),
        Command::Validate(a) => run_validate(a),
        Command::ClonerEquiv(a) => run_cloner_equiv(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (content, code) = match dispatch(&cli.command) {
        Ok(ok) => ok,
        Err(e) => {
            let doc = json!({ "error": { "kind": e.kind, "message": e.message } });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable error"));
            return ExitCode::from(e.code);
        }
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &content) {
                let e = CliError::io(e);
                let doc = json!({ "error": { "kind": e.kind, "message": e.message } });
                println!("{}", serde_json::to_string_pretty(&doc).expect("serializable error"));
                return ExitCode::from(e.code);
            }
        }
        None => print!("{content}"),
    }
    ExitCode::from(code)
}
