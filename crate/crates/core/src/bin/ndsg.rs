use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ndsg::asymptotics::{asymptotic_only_table, asymptotic_sequence, build_comparison_table, AsymptoticContext, AsymptoticTable};
use ndsg::exec::init_thread_pool_from_env;
use ndsg::io::{self, fmt_f64, RunConfig};
use ndsg::model::{physical_to_dimensionless, PhysicalParams};
use ndsg::traveling_wave::{
    assemble_kink, find_lambda_spectrum, find_velocity_spectrum, fourth_order_spectrum, sweep_velocity_branches, KinkOptions,
    ScanOptions, ShootControls, Spacing, VelocitySpectrum,
};
use ndsg::{Execution, ModelParams, NdsgError, Result};

/// Radiationless kinks of the nonlocal double sine-Gordon equation.
///
/// Set NDSG_THREADS to limit the number of worker threads.
#[derive(Parser)]
#[command(name = "ndsg", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discrete kink velocities (or lambda_n / delta_n sequences).
    Spectrum(SpectrumArgs),
    /// Closed-form asymptotic sequences, optionally next to computed values.
    Asympt(AsymptArgs),
    /// Profile and energy of one traveling kink.
    Kink(KinkArgs),
    /// Time evolution from a config file or a bundled recipe.
    Evolve(EvolveArgs),
    /// Convert physical lengths to the dimensionless parameters.
    Units(UnitsArgs),
}

#[derive(Args)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Do all work on the calling thread.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long, default_value_t = 0.3)]
    lambda: f64,
    #[arg(long = "A", default_value_t = 0.125, allow_hyphen_values = true)]
    a: f64,
    /// Enumerate delta_n of the fourth-order approximation.
    #[arg(long, conflicts_with = "lambda_spectrum")]
    fourth_order: bool,
    /// Enumerate lambda_n at fixed velocity --v.
    #[arg(long, requires = "v")]
    lambda_spectrum: bool,
    #[arg(long)]
    v: Option<f64>,
    /// Scan interval; defaults depend on the mode.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
    range: Option<Vec<f64>>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long, default_value_t = 2000)]
    points: usize,
    /// Space scan points uniformly in log (default for lambda_n and delta_n).
    #[arg(long)]
    geometric: bool,
    /// Sweep lambda geometrically and tabulate the first --branches velocities.
    #[arg(long, conflicts_with_all = ["fourth_order", "lambda_spectrum"])]
    sweep: bool,
    #[arg(long, default_value_t = 0.02)]
    lambda_min: f64,
    #[arg(long, default_value_t = 0.5)]
    lambda_max: f64,
    #[arg(long, default_value_t = 16)]
    count: usize,
    #[arg(long, default_value_t = 3)]
    branches: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct AsymptArgs {
    #[arg(long = "A", allow_hyphen_values = true)]
    a: f64,
    #[arg(long)]
    v: Option<f64>,
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long)]
    fourth_order: bool,
    /// Phase offset in the asymptotic formula.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta0: f64,
    /// Also run the solver and report deviations.
    #[arg(long)]
    compute: bool,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    range: Option<Vec<f64>>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct KinkArgs {
    #[arg(long, default_value_t = 0.3)]
    lambda: f64,
    #[arg(long = "A", default_value_t = 0.125, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, conflicts_with = "v")]
    branch: Option<usize>,
    /// Kink velocity, if already known.
    #[arg(long)]
    v: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    h: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct EvolveArgs {
    /// TOML run configuration.
    #[arg(required_unless_present_any = ["recipe", "list"], conflicts_with = "recipe")]
    config: Option<PathBuf>,
    /// Bundled recipe: fig3a, fig3b, fig5 or fig6.
    #[arg(long)]
    recipe: Option<String>,
    /// Print the bundled recipes and exit.
    #[arg(long)]
    list: bool,
    /// Override the output directory of the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct UnitsArgs {
    /// London penetration depth.
    #[arg(long)]
    lambda_l: f64,
    /// Superconducting-layer half-thickness.
    #[arg(long)]
    l: f64,
    /// Tunnel-layer half-thickness.
    #[arg(long)]
    d: f64,
    /// Josephson length.
    #[arg(long)]
    lambda_j: f64,
    #[arg(long)]
    jc: Option<f64>,
    /// Second-harmonic current density.
    #[arg(long)]
    j2: Option<f64>,
    /// Typical wavenumber, for the thin-layer check.
    #[arg(long)]
    k: Option<f64>,
}

fn main() -> ExitCode {
    init_thread_pool_from_env();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spectrum(a) => cmd_spectrum(&a),
        Command::Asympt(a) => cmd_asympt(&a),
        Command::Kink(a) => cmd_kink(&a),
        Command::Evolve(a) => cmd_evolve(&a),
        Command::Units(a) => cmd_units(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if matches!(e, NdsgError::InsufficientAccuracy { .. }) {
                eprintln!("status: insufficient accuracy");
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(value).map_err(|e| NdsgError::Io(e.to_string()))?;
    std::fs::write(path, s + "\n")?;
    Ok(())
}

fn range_arg(r: &Option<Vec<f64>>) -> Option<(f64, f64)> {
    r.as_ref().map(|r| (r[0], r[1]))
}

/// Scan interval bracketing the first `n` predicted values, with margins.
fn range_from_asymptotics(ctx: AsymptoticContext, n: usize) -> Result<(f64, f64)> {
    let seq = asymptotic_sequence(ctx, n, 0.0)?;
    Ok((0.8 * seq[n - 1], 1.5 * seq[0]))
}

fn cmd_spectrum(args: &SpectrumArgs) -> Result<()> {
    let exec = args.common.exec();
    let controls = ShootControls::default();
    std::fs::create_dir_all(&args.common.out)?;

    if args.sweep {
        if args.count < 2 || !(args.lambda_min > 0.0 && args.lambda_max > args.lambda_min) {
            return Err(NdsgError::Domain("sweep needs 0 < lambda-min < lambda-max and count >= 2".into()));
        }
        let ratio = (args.lambda_max / args.lambda_min).ln() / (args.count - 1) as f64;
        let lambdas: Vec<f64> = (0..args.count).map(|i| args.lambda_min * (ratio * i as f64).exp()).collect();
        let range = range_arg(&args.range).unwrap_or((0.05, 0.999));
        let opts = ScanOptions { points: args.points, exec, ..Default::default() };
        let sweep = sweep_velocity_branches(args.a, &lambdas, args.branches, range, &controls, &opts)?;
        let path = args.common.out.join("branches.csv");
        io::sweep_table(&sweep).write(&path)?;
        println!("{} lambdas x {} branches -> {}", lambdas.len(), args.branches, path.display());
        if !sweep.strictly_ordered() {
            println!("warning: branches are not strictly ordered at every lambda");
        }
        return Ok(());
    }

    let spacing = |default_geometric: bool| if args.geometric || default_geometric { Spacing::Geometric } else { Spacing::Linear };
    let spectrum: VelocitySpectrum = if args.fourth_order {
        let n_max = args.n_max.unwrap_or(6);
        let range = match range_arg(&args.range) {
            Some(r) => r,
            None => range_from_asymptotics(AsymptoticContext::FourthOrder { a: args.a }, n_max)?,
        };
        let opts = ScanOptions { points: args.points, spacing: spacing(true), exec, ..Default::default() };
        fourth_order_spectrum(args.a, range, n_max, &controls, &opts)?
    } else if args.lambda_spectrum {
        let v = args.v.expect("clap enforces --v");
        let n_max = args.n_max.unwrap_or(6);
        let range = match range_arg(&args.range) {
            Some(r) => r,
            None => range_from_asymptotics(AsymptoticContext::Full { a: args.a, v }, n_max)?,
        };
        let opts = ScanOptions { points: args.points, spacing: spacing(true), exec, ..Default::default() };
        find_lambda_spectrum(args.a, v, range, n_max, &controls, &opts)?
    } else {
        let params = ModelParams::new(args.lambda, args.a)?;
        let range = range_arg(&args.range).unwrap_or((0.05, 0.99));
        let opts = ScanOptions { points: args.points, spacing: spacing(false), exec, ..Default::default() };
        find_velocity_spectrum(&params, range, args.n_max.unwrap_or(10), &controls, &opts)?
    };

    let csv = args.common.out.join("spectrum.csv");
    io::spectrum_table(&spectrum).write(&csv)?;
    write_json(&args.common.out.join("spectrum.json"), &spectrum)?;
    if spectrum.is_empty() {
        println!("no kinks in {:?} ({} unresolved brackets, {} suspected dips)", spectrum.range, spectrum.unresolved.len(), spectrum.suspected.len());
    }
    for e in &spectrum.entries {
        println!("{:>3}  {}  (R = {:.2e})", e.n, fmt_f64(e.value), e.mismatch);
    }
    println!("-> {}", csv.display());
    Ok(())
}

fn print_asymptotic_table(t: &AsymptoticTable) {
    println!("{:>3}  {:>10}  {:>10}  {:>10}", "n", "asympt.", "calcul.", "rel.dev.");
    for r in &t.rows {
        let c = r.computed.map_or("-".to_string(), |c| format!("{c:.4}"));
        let d = r.rel_deviation.map_or("-".to_string(), |d| format!("{d:.2e}"));
        println!("{:>3}  {:>10.4}  {:>10}  {:>10}", r.n, r.asymptotic, c, d);
    }
}

fn cmd_asympt(args: &AsymptArgs) -> Result<()> {
    if args.n == 0 {
        return Err(NdsgError::Domain("--n must be at least 1".into()));
    }
    let ctx = if args.fourth_order {
        AsymptoticContext::FourthOrder { a: args.a }
    } else {
        let v = args.v.ok_or_else(|| NdsgError::Config("--v is required unless --fourth-order is given".into()))?;
        AsymptoticContext::Full { a: args.a, v }
    };
    let table = match asymptotic_only_table(ctx, args.theta0, args.n) {
        Err(NdsgError::NotApplicable(msg)) => {
            println!("not applicable: {msg}");
            return Ok(());
        }
        other => other?,
    };
    let table = if args.compute {
        let range = match range_arg(&args.range) {
            Some(r) => r,
            None => range_from_asymptotics(ctx, args.n)?,
        };
        let opts = ScanOptions { spacing: Spacing::Geometric, exec: args.common.exec(), ..Default::default() };
        let controls = ShootControls::default();
        let spectrum = match ctx {
            AsymptoticContext::FourthOrder { a } => fourth_order_spectrum(a, range, args.n, &controls, &opts)?,
            AsymptoticContext::Full { a, v } => find_lambda_spectrum(a, v, range, args.n, &controls, &opts)?,
        };
        build_comparison_table(&spectrum, ctx, args.theta0, args.n)?
    } else {
        table
    };
    std::fs::create_dir_all(&args.common.out)?;
    let path = args.common.out.join("asympt.csv");
    io::asymptotic_table(&table).write(&path)?;
    print_asymptotic_table(&table);
    println!("-> {}", path.display());
    Ok(())
}

fn cmd_kink(args: &KinkArgs) -> Result<()> {
    let params = ModelParams::new(args.lambda, args.a)?;
    let (v, branch) = match (args.v, args.branch) {
        (Some(v), _) => (v, None),
        (None, b) => {
            let n = b.unwrap_or(1);
            let opts = ScanOptions { exec: args.common.exec(), ..Default::default() };
            let s = find_velocity_spectrum(&params, (0.05, 0.999), n, &ShootControls::default(), &opts)?;
            (s.branch(n)?.value, Some(n))
        }
    };
    let kink = assemble_kink(&params, v, &KinkOptions { h: args.h, branch, ..Default::default() })?;
    std::fs::create_dir_all(&args.common.out)?;
    let path = args.common.out.join("kink.csv");
    io::kink_table(&kink)?.write(&path)?;
    #[derive(serde::Serialize)]
    struct Summary<'a> {
        v: f64,
        lambda: f64,
        a: f64,
        branch: Option<usize>,
        mismatch: f64,
        residual: f64,
        energy: &'a ndsg::evolution::EnergyReport,
    }
    let summary = Summary { v, lambda: kink.lambda, a: kink.a, branch, mismatch: kink.mismatch, residual: kink.residual, energy: &kink.energy };
    write_json(&args.common.out.join("kink.json"), &summary)?;
    println!("v = {}  W = {:.4}  (residual {:.1e})", fmt_f64(v), kink.energy.total, kink.residual);
    println!("-> {}", path.display());
    Ok(())
}

fn cmd_evolve(args: &EvolveArgs) -> Result<()> {
    if args.list {
        for (name, src) in io::RECIPES {
            println!("{name}: {}", src.lines().next().unwrap_or("").trim_start_matches("# "));
        }
        return Ok(());
    }
    let config = match (&args.recipe, &args.config) {
        (Some(name), _) => io::recipe(name)?,
        (None, Some(path)) => RunConfig::from_toml(&std::fs::read_to_string(path)?)?,
        (None, None) => unreachable!("clap requires a config or a recipe"),
    };
    let dir = args.out.clone().unwrap_or_else(|| PathBuf::from(&config.output.dir));
    let exec = if args.sequential { Execution::Sequential } else { Execution::Parallel };
    let report = io::execute(&config, &dir, exec)?;
    let s = &report.manifest.summary;
    println!("tau reached {:.2}, {} front records", s.tau_reached, s.front_records);
    if let (Some(w0), Some(w1)) = (s.initial_energy, s.final_energy) {
        println!("interior energy {w0:.4} -> {w1:.4}");
    }
    if let Some(r) = &s.relaxation {
        println!("terminal velocity {:.4} +- {:.4}", r.terminal_velocity, r.terminal_std);
        if let (Some(n), Some(vn)) = (r.nearest_branch, r.nearest_velocity) {
            println!("nearest kink: branch {n}, v = {vn:.4}, core deviation {:.3e}", r.core_deviation.unwrap_or(f64::NAN));
        }
    }
    println!("-> {}", dir.join("manifest.json").display());
    match report.output.error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn cmd_units(args: &UnitsArgs) -> Result<()> {
    let phys = PhysicalParams { lambda_l: args.lambda_l, l: args.l, d: args.d, lambda_j: args.lambda_j, j_c: args.jc, j2: args.j2 };
    let r = physical_to_dimensionless(&phys, args.k)?;
    println!("lambda      = {}", fmt_f64(r.lambda));
    if let Some(a) = r.a {
        println!("A           = {}", fmt_f64(a));
    }
    println!("lambda_eff  = lambda_L sqrt(L / (L + d)) = {}", fmt_f64(r.lambda_eff.value));
    for (name, s) in [("space", &r.space_scale), ("time", &r.time_scale), ("nonlocal", &r.nonlocal_prefactor), ("energy", &r.energy_prefactor)] {
        println!("{name:<11} = {} [{}]", fmt_f64(s.value), s.unit);
    }
    if let Some(t) = r.thin_layer_parameter {
        println!("2L sqrt(lambda_L^-2 + k^2) = {}", fmt_f64(t));
    }
    for w in &r.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
