//! Command-line surface of the synthesis engine.
//!
//! Every command writes bit-stable CSV/JSON files into the output directory
//! and echoes its effective configuration into a metadata block. Exit code 0
//! means all internal invariants passed; 2 means a failure, reported as a
//! machine-readable JSON record on stdout.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use s2synth::cutlocus::{convergence_report, default_s_grid, gamma_o_alpha};
use s2synth::export;
use s2synth::extremal::{switching_curve, AlphaParam};
use s2synth::front::{extremal_front_with_grid, front_point, FRONT_GRID};
use s2synth::oracle::{pendulum_grid_oracle, sphere_family_oracle, SphereOracleConfig};
use s2synth::pendulum::{overlap_curve, sample_synthesis, PenSynthesis};
use s2synth::regimes::{classify, AlphaSpec};
use s2synth::so3::{MirrorX3, Sign};
use s2synth::verify::run_verification;

#[derive(Parser)]
#[command(name = "s2synth", version, about = "Time-optimal synthesis on the sphere")]
struct Cli {
    /// JSON config file; explicit flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV/JSON artifacts.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,

    /// Include wall-clock timings in the metadata block (off by default so
    /// that identical configurations produce byte-identical outputs).
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extremal front at k*pi: samples, topology and series residuals.
    Front(FrontArgs),
    /// Switching curves with tangents and cone verdicts.
    SwitchingCurves(SwitchingArgs),
    /// Pendulum limit synthesis from a circle source.
    Pendulum(PendulumArgs),
    /// Overlap-curve continuation and convergence to the pendulum cut locus.
    Cutlocus(CutlocusArgs),
    /// Regime classification with the regime-specific objects.
    Classify(AlphaArgs),
    /// Brute-force value maps.
    Oracle(OracleArgs),
    /// Self-check battery.
    Verify(VerifyArgs),
}

/// How alpha approaches zero: a direct value or one of the three sequences.
#[derive(Args, Clone, Serialize, Deserialize)]
struct AlphaArgs {
    /// Direct value of alpha (radians).
    #[arg(long)]
    alpha: Option<f64>,
    /// Sequence index k.
    #[arg(short = 'k', long)]
    k: Option<usize>,
    /// Constant remainder: alpha = pi / (2 (k + rbar)).
    #[arg(long)]
    rbar: Option<f64>,
    /// Proportional remainder: r(alpha) = C alpha.
    #[arg(long = "C")]
    c: Option<f64>,
    /// Zero remainder: alpha = pi / (2 k).
    #[arg(long)]
    r0: bool,
}

impl AlphaArgs {
    fn spec(&self) -> Result<AlphaSpec> {
        let forms = [
            self.alpha.is_some(),
            self.rbar.is_some(),
            self.c.is_some(),
            self.r0,
        ];
        if forms.iter().filter(|&&x| x).count() != 1 {
            bail!("exactly one of --alpha, --rbar, --C, --r0 must be given");
        }
        if let Some(alpha) = self.alpha {
            return Ok(AlphaSpec::Direct { alpha });
        }
        let k = self.k.ok_or_else(|| anyhow!("--k is required with --rbar/--C/--r0"))?;
        if let Some(rbar) = self.rbar {
            Ok(AlphaSpec::ConstantRemainder { k, rbar })
        } else if let Some(c) = self.c {
            Ok(AlphaSpec::ProportionalRemainder { k, c })
        } else {
            Ok(AlphaSpec::ZeroRemainder { k })
        }
    }

    fn param(&self) -> Result<AlphaParam> {
        Ok(self.spec()?.build()?.0)
    }
}

#[derive(Args, Clone, Serialize, Deserialize)]
struct FrontArgs {
    #[command(flatten)]
    alpha: AlphaArgs,
    /// Front index: "kM", "kM-1", "kM-2" or an integer.
    #[arg(long, default_value = "kM")]
    k_index: String,
    /// Samples per branch.
    #[arg(long, default_value_t = FRONT_GRID)]
    grid: usize,
}

#[derive(Args, Clone, Serialize, Deserialize)]
struct SwitchingArgs {
    #[command(flatten)]
    alpha: AlphaArgs,
    /// Curve index ("all" or an integer in 1..=kM).
    #[arg(long, default_value = "all")]
    curve_k: String,
    /// Samples per curve.
    #[arg(long, default_value_t = 256)]
    grid: usize,
}

#[derive(Args, Clone, Serialize, Deserialize)]
struct PendulumArgs {
    /// Source circle radius in (0, 2].
    #[arg(long)]
    rho: f64,
    /// Feedback/value samples per axis.
    #[arg(long, default_value_t = 81)]
    grid_n: usize,
    /// Overlap curve samples.
    #[arg(long, default_value_t = 500)]
    overlap_n: usize,
}

#[derive(Args, Clone, Serialize, Deserialize)]
struct CutlocusArgs {
    /// Constant remainder of the sequence.
    #[arg(long)]
    rbar: f64,
    /// Comma-separated list of sequence indices.
    #[arg(long, value_delimiter = ',', default_value = "10,20,40")]
    k_list: Vec<usize>,
    /// Continuation step in s.
    #[arg(long, default_value_t = 0.01)]
    s_step: f64,
}

#[derive(Args, Clone, Serialize)]
struct OracleArgs {
    #[command(subcommand)]
    which: OracleKind,
}

#[derive(Subcommand, Clone, Serialize)]
enum OracleKind {
    /// Pendulum grid oracle over B(0, rho).
    Pendulum {
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 5e-3)]
        h: f64,
        #[arg(long, default_value_t = 5e-3)]
        dt: f64,
    },
    /// Extremal-family enumeration near the south pole.
    Sphere {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long, default_value_t = 0.02)]
        cell: f64,
        /// Planar window half-width (defaults to 2(1+r) + 1).
        #[arg(long)]
        window: Option<f64>,
        #[arg(long, default_value_t = 2000)]
        n_s_i: usize,
        #[arg(long, default_value_t = 500)]
        n_s_f: usize,
    },
}

#[derive(Args, Clone, Serialize, Deserialize)]
struct VerifyArgs {
    /// Seed for the randomized sample selection.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("S2SYNTH_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let record = json!({ "failure": { "message": format!("{err:#}") } });
            println!("{record}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    std::fs::create_dir_all(&cli.out_dir)
        .with_context(|| format!("creating {}", cli.out_dir.display()))?;
    let started = Instant::now();
    match &cli.command {
        Command::Front(args) => cmd_front(cli, &merge(cli, "front", args)?, started),
        Command::SwitchingCurves(args) => {
            cmd_switching(cli, &merge(cli, "switching-curves", args)?, started)
        }
        Command::Pendulum(args) => cmd_pendulum(cli, &merge(cli, "pendulum", args)?, started),
        Command::Cutlocus(args) => cmd_cutlocus(cli, &merge(cli, "cutlocus", args)?, started),
        Command::Classify(args) => cmd_classify(cli, &merge(cli, "classify", args)?, started),
        Command::Oracle(args) => cmd_oracle(cli, args, started),
        Command::Verify(args) => cmd_verify(cli, &merge(cli, "verify", args)?, started),
    }
}

/// Overlays CLI flags on top of the config-file section for the command.
/// Flags that were explicitly provided win; the merged struct is the
/// effective configuration echoed into the metadata.
fn merge<T: Serialize + Clone + for<'de> serde::Deserialize<'de>>(
    cli: &Cli,
    section: &str,
    args: &T,
) -> Result<T> {
    let Some(path) = &cli.config else {
        return Ok(args.clone());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let file: serde_json::Value = serde_json::from_str(&text).context("parsing config")?;
    let Some(base) = file.get(section) else {
        return Ok(args.clone());
    };
    // start from the config section, overlay every non-null flag value
    let mut merged = base.clone();
    let flags = serde_json::to_value(args)?;
    overlay(&mut merged, &flags);
    Ok(serde_json::from_value(merged).context("config/flag merge")?)
}

fn overlay(base: &mut serde_json::Value, flags: &serde_json::Value) {
    match (base, flags) {
        (serde_json::Value::Object(b), serde_json::Value::Object(f)) => {
            for (k, v) in f {
                match b.get_mut(k) {
                    Some(slot) if !v.is_null() => overlay(slot, v),
                    _ => {
                        if !v.is_null() {
                            b.insert(k.clone(), v.clone());
                        }
                    }
                }
            }
        }
        (b, f) => {
            if !f.is_null() {
                *b = f.clone();
            }
        }
    }
}

fn metadata<T: Serialize>(cli: &Cli, config: &T, started: Instant) -> serde_json::Value {
    let mut meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": serde_json::to_value(config).unwrap(),
    });
    if cli.timings {
        meta["timings"] = json!({ "wall_s": started.elapsed().as_secs_f64() });
    }
    meta
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn resolve_k_index(expr: &str, k_max: usize) -> Result<usize> {
    match expr {
        "kM" => Ok(k_max),
        "kM-1" => Ok(k_max - 1),
        "kM-2" => Ok(k_max - 2),
        other => other
            .parse::<usize>()
            .map_err(|_| anyhow!("invalid k-index {other:?} (use kM, kM-1, kM-2 or an integer)")),
    }
}

fn cmd_front(cli: &Cli, args: &FrontArgs, started: Instant) -> Result<()> {
    let alpha = args.alpha.param()?;
    let k = resolve_k_index(&args.k_index, alpha.k_max())?;
    let front = extremal_front_with_grid(&alpha, k, args.grid)?;

    // internal invariants: branch gluing and mirror symmetry
    let glue = (front_point(&alpha, k, Sign::Plus, 0.0)?.as_vector()
        - front_point(&alpha, k, Sign::Minus, std::f64::consts::PI)?.as_vector())
    .norm();
    if glue > 1e-10 {
        bail!("front gluing invariant violated: gap {glue:e}");
    }
    for smp in front.samples_plus.iter().step_by(97) {
        let mirrored = front_point(&alpha, k, Sign::Minus, smp.s)?;
        if (smp.point.mirror_x3().as_vector() - mirrored.as_vector()).norm() > 1e-12 {
            bail!("front mirror invariant violated at s = {}", smp.s);
        }
    }

    let mut meta = metadata(cli, args, started);
    for (key, value) in export::front_metadata(&front)
        .as_object()
        .unwrap()
        .iter()
    {
        meta[key] = value.clone();
    }
    write(&cli.out_dir.join("front.csv"), &export::front_csv(&front))?;
    write(
        &cli.out_dir.join("front.json"),
        &serde_json::to_string_pretty(&meta)?,
    )?;
    Ok(())
}

fn cmd_switching(cli: &Cli, args: &SwitchingArgs, started: Instant) -> Result<()> {
    let alpha = args.alpha.param()?;
    let ks: Vec<usize> = if args.curve_k == "all" {
        (1..=alpha.k_max()).collect()
    } else {
        vec![resolve_k_index(&args.curve_k, alpha.k_max())?]
    };
    let mut samples = Vec::new();
    for &k in &ks {
        for eps in [Sign::Plus, Sign::Minus] {
            for j in 1..=args.grid {
                let s = std::f64::consts::PI * j as f64 / args.grid as f64;
                samples.push(switching_curve(k, eps, s, &alpha)?);
            }
        }
    }
    write(
        &cli.out_dir.join("switching_curves.csv"),
        &export::switching_csv(&samples),
    )?;
    write(
        &cli.out_dir.join("switching_curves.json"),
        &serde_json::to_string_pretty(&metadata(cli, args, started))?,
    )?;
    Ok(())
}

fn cmd_pendulum(cli: &Cli, args: &PendulumArgs, started: Instant) -> Result<()> {
    // build + validate (locus residuals, quadrant condition)
    let _syn = PenSynthesis::build(args.rho, args.overlap_n.max(8))?;
    let overlap = overlap_curve(args.rho, args.overlap_n)?;
    let rows = sample_synthesis(args.rho, args.grid_n)?;
    write(
        &cli.out_dir.join("pendulum_overlap.csv"),
        &export::overlap_csv(&overlap),
    )?;
    write(
        &cli.out_dir.join("pendulum_synthesis.csv"),
        &export::synthesis_csv(&rows),
    )?;
    write(
        &cli.out_dir.join("pendulum.json"),
        &serde_json::to_string_pretty(&metadata(cli, args, started))?,
    )?;
    Ok(())
}

fn cmd_cutlocus(cli: &Cli, args: &CutlocusArgs, started: Instant) -> Result<()> {
    let mut grid = Vec::new();
    let mut s = 0.02;
    while s < std::f64::consts::PI - 0.02 + 1e-12 {
        grid.push(s);
        s += args.s_step;
    }
    if grid.is_empty() {
        grid = default_s_grid();
    }
    for &k in &args.k_list {
        let alpha = AlphaParam::from_k_rbar(k, args.rbar)?;
        let gamma = gamma_o_alpha(&alpha, &grid)?;
        if !gamma.gaps.is_empty() {
            bail!("continuation gaps at k = {k}: {:?}", gamma.gaps);
        }
        write(
            &cli.out_dir.join(format!("gamma_k{k}.csv")),
            &export::gamma_csv(&gamma),
        )?;
    }
    let report = convergence_report(args.rbar, &args.k_list)?;
    let monotone = report.hausdorff.windows(2).all(|w| w[1] < w[0]);
    let mut meta = metadata(cli, args, started);
    meta["report"] = serde_json::to_value(&report)?;
    write(
        &cli.out_dir.join("cutlocus_report.json"),
        &serde_json::to_string_pretty(&meta)?,
    )?;
    if !monotone {
        bail!(
            "hausdorff distances do not decrease monotonically: {:?}",
            report.hausdorff
        );
    }
    Ok(())
}

fn cmd_classify(cli: &Cli, args: &AlphaArgs, started: Instant) -> Result<()> {
    let report = classify(&args.spec()?)?;
    let mut meta = metadata(cli, args, started);
    meta["report"] = serde_json::to_value(&report)?;
    write(
        &cli.out_dir.join("case_report.json"),
        &serde_json::to_string_pretty(&meta)?,
    )?;
    Ok(())
}

fn cmd_oracle(cli: &Cli, args: &OracleArgs, started: Instant) -> Result<()> {
    match &args.which {
        OracleKind::Pendulum { rho, h, dt } => {
            let map = pendulum_grid_oracle(*rho, *h, *dt)?;
            write(
                &cli.out_dir.join("pendulum_oracle.csv"),
                &export::value_map_csv(&map),
            )?;
        }
        OracleKind::Sphere {
            alpha,
            cell,
            window,
            n_s_i,
            n_s_f,
        } => {
            let param = alpha.param()?;
            let mut config = SphereOracleConfig::default_for(&param);
            config.cell = *cell;
            config.n_s_i = *n_s_i;
            config.n_s_f = *n_s_f;
            if let Some(w) = window {
                config.window = *w;
            }
            let map = sphere_family_oracle(&param, &config)?;
            write(
                &cli.out_dir.join("sphere_oracle.csv"),
                &export::value_map_csv(&map),
            )?;
        }
    }
    write(
        &cli.out_dir.join("oracle.json"),
        &serde_json::to_string_pretty(&metadata(cli, args, started))?,
    )?;
    Ok(())
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs, started: Instant) -> Result<()> {
    let report = run_verification(args.seed)?;
    for check in &report.checks {
        println!(
            "  [{}] {}: {}",
            if check.pass { "ok" } else { "FAIL" },
            check.name,
            check.detail
        );
    }
    let mut meta = metadata(cli, args, started);
    meta["report"] = serde_json::to_value(&report)?;
    write(
        &cli.out_dir.join("verify_report.json"),
        &serde_json::to_string_pretty(&meta)?,
    )?;
    if !report.all_pass() {
        bail!("verification battery failed");
    }
    Ok(())
}
