//! Command-line pipeline: generate, validate, pair, simulate, fit, build,
//! solve, report.

use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use railsync::fitting::{fit_instance, generate_sample_set, SampleOptions};
use railsync::io;
use railsync::lp::{build_lp, read_lp, write_lp, LinearProgram};
use railsync::model::{audit_timetable, validate_instance, Instance, Timetable};
use railsync::pairing::{build_sync_events, SyncEvents};
use railsync::report::{compare, crossvalidate, predict_energy, SolveSummary};
use railsync::scenario::{generate_scenario, ScenarioParams};
use railsync::solver::{extract_timetable, solve_lp, warm_start_point, SolveOptions, SolveStatus};
use railsync::FitBundle;

type CliResult = Result<(), Box<dyn Error>>;

#[derive(Parser)]
#[command(
    name = "railsync",
    about = "Energy-aware metro timetable optimization",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance and its feasible baseline timetable.
    Gen(GenArgs),
    /// Validate an instance file and optionally audit a timetable against it.
    Check(CheckArgs),
    /// Audit a timetable against an instance's robustified windows.
    Audit(AuditArgs),
    /// Construct the synchronization event sets from a baseline timetable.
    Pair(PairArgs),
    /// Run the kinematics oracle and write the sample tables.
    Simulate(SimulateArgs),
    /// Fit the affine surrogates from sample tables.
    Fit(FitArgs),
    /// Assemble the LP and write it in interchange format.
    Build(BuildArgs),
    /// Solve the LP and write the optimized timetable.
    Solve(SolveArgs),
    /// Compare baseline and optimized timetables, optionally against the
    /// kinematics oracle.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 40)]
    trains: usize,
    #[arg(long, default_value_t = 14)]
    stations: usize,
    /// Output directory for instance.toml and baseline.csv.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, short = 'i')]
    instance: PathBuf,
    #[arg(long, short = 't')]
    timetable: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long, short = 'i')]
    instance: PathBuf,
    #[arg(long, short = 't')]
    timetable: PathBuf,
}

#[derive(Args)]
struct PairArgs {
    #[arg(long, short = 'i')]
    instance: PathBuf,
    #[arg(long, short = 'b')]
    baseline: PathBuf,
    #[arg(long, short = 'o', default_value = "events.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, short = 'i')]
    instance: PathBuf,
    #[arg(long, short = 'b')]
    baseline: PathBuf,
    /// Event list from `pair`; omitted, events are rebuilt from the baseline.
    #[arg(long, short = 'e')]
    events: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long, short = 'i')]
    instance: PathBuf,
    /// Directory holding the sample tables from `simulate`.
    #[arg(long, default_value = ".")]
    samples_dir: PathBuf,
    #[arg(long, short = 'o', default_value = "fits.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long, short = 'i')]
    instance: PathBuf,
    #[arg(long, short = 'b')]
    baseline: PathBuf,
    /// Fit file from `fit`; omitted, fits are computed from the oracle.
    #[arg(long)]
    fits: Option<PathBuf>,
    /// Event list from `pair`; omitted, events are rebuilt.
    #[arg(long, short = 'e')]
    events: Option<PathBuf>,
    #[arg(long, short = 'o', default_value = "model.lp")]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, short = 'i')]
    instance: PathBuf,
    #[arg(long, short = 'b')]
    baseline: PathBuf,
    /// Solve a previously written interchange file instead of rebuilding.
    #[arg(long)]
    lp: Option<PathBuf>,
    /// Warm-start from this timetable (point-level initialization).
    #[arg(long)]
    warm_start: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iters: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short = 'o', default_value = "optimized.csv")]
    out_timetable: PathBuf,
    /// Also write the solution summary to this file.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, short = 'i')]
    instance: PathBuf,
    #[arg(long)]
    baseline: PathBuf,
    #[arg(long)]
    optimized: PathBuf,
    /// Recompute transfers with the kinematics oracle and report both
    /// prediction routes.
    #[arg(long)]
    crossvalidate: bool,
    /// Write a machine-readable summary row to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

pub fn run() -> CliResult {
    match Cli::parse().command {
        Command::Gen(args) => cmd_gen(args),
        Command::Check(args) => cmd_check(args),
        Command::Audit(args) => cmd_audit(args),
        Command::Pair(args) => cmd_pair(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Build(args) => cmd_build(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Report(args) => cmd_report(args),
    }
}

fn load_instance(path: &Path) -> Result<Instance, Box<dyn Error>> {
    Ok(io::read_instance(&fs::read_to_string(path)?)?)
}

/// Events, oracle samples, and fits straight from the instance + baseline.
fn prepare(
    instance: &Instance,
    baseline: &Timetable,
) -> Result<(SyncEvents, FitBundle), Box<dyn Error>> {
    let events = build_sync_events(instance, baseline);
    let samples = generate_sample_set(instance, baseline, &events, &SampleOptions::default())?;
    let fits = fit_instance(instance, &samples)?;
    Ok((events, fits))
}

fn cmd_gen(args: GenArgs) -> CliResult {
    let (instance, baseline) =
        generate_scenario(args.seed, args.trains, args.stations, &ScenarioParams::default());
    fs::create_dir_all(&args.out_dir)?;
    let instance_path = args.out_dir.join("instance.toml");
    fs::write(&instance_path, io::write_instance(&instance)?)?;
    let timetable_path = args.out_dir.join("baseline.csv");
    io::write_timetable(&timetable_path, &instance, &baseline)?;
    println!(
        "wrote {} and {} ({} trains, {} stations, seed {})",
        instance_path.display(),
        timetable_path.display(),
        args.trains,
        args.stations,
        args.seed
    );
    Ok(())
}

fn cmd_check(args: CheckArgs) -> CliResult {
    let instance = load_instance(&args.instance)?;
    let violations = validate_instance(&instance);
    if violations.is_empty() {
        println!("instance: OK");
    } else {
        println!("instance: {} violations", violations.len());
        for v in &violations {
            println!("  {v}");
        }
    }
    if let Some(tt_path) = args.timetable {
        let tt = io::read_timetable(&tt_path, &instance)?;
        print_audit(&instance, &tt)?;
    }
    if !violations.is_empty() {
        std::process::exit(2);
    }
    Ok(())
}

fn cmd_audit(args: AuditArgs) -> CliResult {
    let instance = load_instance(&args.instance)?;
    let tt = io::read_timetable(&args.timetable, &instance)?;
    print_audit(&instance, &tt)
}

fn print_audit(instance: &Instance, tt: &Timetable) -> CliResult {
    let report = audit_timetable(instance, tt)?;
    for (family, entries) in &report.violations {
        println!("{family}: {} violations", entries.len());
        for e in entries.iter().take(10) {
            println!("  {} value={} slack={}", e.key, e.value, e.slack);
        }
        if entries.len() > 10 {
            println!("  ... {} more", entries.len() - 10);
        }
    }
    println!(
        "timetable: {}",
        if report.is_feasible() { "FEASIBLE" } else { "INFEASIBLE" }
    );
    Ok(())
}

fn cmd_pair(args: PairArgs) -> CliResult {
    let instance = load_instance(&args.instance)?;
    let baseline = io::read_timetable(&args.baseline, &instance)?;
    let events = build_sync_events(&instance, &baseline);
    io::write_events(&args.out, &instance, &events)?;
    println!(
        "wrote {} ({} right, {} left events)",
        args.out.display(),
        events.right.len(),
        events.left.len()
    );
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> CliResult {
    let instance = load_instance(&args.instance)?;
    let baseline = io::read_timetable(&args.baseline, &instance)?;
    let events = match &args.events {
        Some(path) => io::read_events(path, &instance)?,
        None => build_sync_events(&instance, &baseline),
    };
    let samples = generate_sample_set(&instance, &baseline, &events, &SampleOptions::default())?;
    fs::create_dir_all(&args.out_dir)?;
    io::write_samples(&args.out_dir, &instance, &samples)?;
    println!(
        "wrote sample tables to {} ({} track sweeps, {} crossover sweeps, {} event sweeps)",
        args.out_dir.display(),
        samples.track_sweeps.len(),
        samples.crossover_sweeps.len(),
        samples.event_sweeps.len()
    );
    Ok(())
}

fn cmd_fit(args: FitArgs) -> CliResult {
    let instance = load_instance(&args.instance)?;
    let samples = io::read_samples(&args.samples_dir, &instance)?;
    let fits = fit_instance(&instance, &samples)?;
    io::write_fits(&args.out, &instance, &fits)?;
    println!(
        "wrote {} ({} consumption, {} crossover, {} phase, {} regen fits)",
        args.out.display(),
        fits.consumption_track.len(),
        fits.consumption_crossover.len(),
        fits.phase.len(),
        fits.regen.len()
    );
    Ok(())
}

fn load_model(
    instance: &Instance,
    baseline: &Timetable,
    fits_path: Option<&Path>,
    events_path: Option<&Path>,
) -> Result<(SyncEvents, FitBundle), Box<dyn Error>> {
    let events = match events_path {
        Some(path) => io::read_events(path, instance)?,
        None => build_sync_events(instance, baseline),
    };
    let fits = match fits_path {
        Some(path) => io::read_fits(path, instance)?,
        None => {
            let samples =
                generate_sample_set(instance, baseline, &events, &SampleOptions::default())?;
            fit_instance(instance, &samples)?
        }
    };
    Ok((events, fits))
}

fn cmd_build(args: BuildArgs) -> CliResult {
    let instance = load_instance(&args.instance)?;
    let baseline = io::read_timetable(&args.baseline, &instance)?;
    let (events, fits) = load_model(
        &instance,
        &baseline,
        args.fits.as_deref(),
        args.events.as_deref(),
    )?;
    let lp = build_lp(&instance, &fits, &events)?;
    let file = fs::File::create(&args.out)?;
    write_lp(&lp, std::io::BufWriter::new(file))?;
    println!(
        "wrote {} ({} variables, {} constraints, {} rows)",
        args.out.display(),
        lp.n_vars(),
        lp.n_facets(),
        lp.n_rows()
    );
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> CliResult {
    let instance = load_instance(&args.instance)?;
    let baseline = io::read_timetable(&args.baseline, &instance)?;
    let (events, fits) = load_model(&instance, &baseline, None, None)?;
    let lp: LinearProgram = match &args.lp {
        Some(path) => read_lp(&fs::read_to_string(path)?, Some(&events))?,
        None => build_lp(&instance, &fits, &events)?,
    };
    let options = SolveOptions {
        tol: args.tol,
        max_iters: args.max_iters,
        seed: args.seed,
        ..SolveOptions::default()
    };
    let warm = match &args.warm_start {
        Some(path) => {
            let tt = io::read_timetable(path, &instance)?;
            Some(warm_start_point(&instance, &fits, &events, &lp, &tt)?)
        }
        None => None,
    };
    let solution = solve_lp(&lp, warm.as_deref(), &options)?;
    let summary = render_summary(&SolveSummary::from(&solution));
    println!("{summary}");
    if let Some(path) = &args.summary {
        fs::write(path, &summary)?;
    }
    if solution.status == SolveStatus::Optimal {
        let tt = extract_timetable(&instance, &lp, &solution.values)?;
        io::write_timetable(&args.out_timetable, &instance, &tt)?;
        println!("wrote {}", args.out_timetable.display());
    }
    Ok(())
}

fn render_summary(s: &SolveSummary) -> String {
    format!(
        "status: {:?}\nobjective_kwh: {}\niterations: {}\nwall_time_s: {:.3}\nprimal_residual: {:.3e}\nduality_gap_rel: {:.3e}",
        s.status, s.objective_kwh, s.iterations, s.wall_time_s, s.primal_residual, s.duality_gap_rel
    )
}

fn cmd_report(args: ReportArgs) -> CliResult {
    let instance = load_instance(&args.instance)?;
    let baseline = io::read_timetable(&args.baseline, &instance)?;
    let optimized = io::read_timetable(&args.optimized, &instance)?;
    let (events, fits) = prepare(&instance, &baseline)?;

    let base_report = predict_energy(&instance, &baseline, &fits, &events)?;
    let opt_report = predict_energy(&instance, &optimized, &fits, &events)?;
    let mut comparison = compare(base_report, opt_report, None);

    if args.crossvalidate {
        let cv = crossvalidate(
            &instance,
            &fits,
            &events,
            &baseline,
            &optimized,
            &Default::default(),
        )?;
        comparison.simulator_reduction_pct = Some(cv.oracle_reduction_pct);
    }

    println!("baseline effective energy:  {:.3} kWh", comparison.baseline.effective_kwh);
    println!("optimized effective energy: {:.3} kWh", comparison.optimized.effective_kwh);
    println!("reduction predicted:        {:.2} %", comparison.reduction_pct);
    if let Some(sim) = comparison.simulator_reduction_pct {
        println!("reduction by oracle:        {sim:.2} %");
    }
    println!(
        "baseline:  consumption {:.3} kWh, transferred {:.3} kWh, {} clamped events",
        comparison.baseline.consumption_kwh,
        comparison.baseline.regen_transferred_kwh,
        comparison.baseline.clamped_event_count
    );
    println!(
        "optimized: consumption {:.3} kWh, transferred {:.3} kWh, {} clamped events",
        comparison.optimized.consumption_kwh,
        comparison.optimized.regen_transferred_kwh,
        comparison.optimized.clamped_event_count
    );

    if let Some(path) = &args.csv {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "baseline_effective_kwh",
            "optimized_effective_kwh",
            "reduction_pct",
            "simulator_reduction_pct",
            "baseline_consumption_kwh",
            "optimized_consumption_kwh",
            "baseline_regen_kwh",
            "optimized_regen_kwh",
            "clamped_events_baseline",
            "clamped_events_optimized",
        ])?;
        w.write_record([
            comparison.baseline.effective_kwh.to_string(),
            comparison.optimized.effective_kwh.to_string(),
            comparison.reduction_pct.to_string(),
            comparison
                .simulator_reduction_pct
                .map(|v| v.to_string())
                .unwrap_or_default(),
            comparison.baseline.consumption_kwh.to_string(),
            comparison.optimized.consumption_kwh.to_string(),
            comparison.baseline.regen_transferred_kwh.to_string(),
            comparison.optimized.regen_transferred_kwh.to_string(),
            comparison.baseline.clamped_event_count.to_string(),
            comparison.optimized.clamped_event_count.to_string(),
        ])?;
        w.flush()?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
