use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use moldable_cli::bench::{plot_trend, run_bench, write_csv, BenchConfig};
use moldable_cli::exit;
use moldable_cli::formats::{parse_instance, parse_schedule, write_instance, write_schedule, FormatError, ScheduleRecord};
use moldable_cli::gantt::render_gantt;
use moldable_core::gen::{generate, GenConfig};
use moldable_core::verify::validate_schedule;
use moldable_core::{solve, validate_instance, Instance, Rat, SolveError};

#[derive(Parser)]
#[command(name = "moldable", version, about = "Contiguous scheduling of monotone moldable jobs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file and print or write the schedule.
    Solve {
        instance: PathBuf,
        /// Search tolerance, as `p/q` or a decimal in (0, 1].
        #[arg(long, default_value = "1/20")]
        epsilon: Rat,
        /// Schedule output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write an SVG Gantt chart here.
        #[arg(long)]
        gantt: Option<PathBuf>,
    },
    /// Generate a random monotone instance.
    Gen {
        #[arg(short = 'n', long = "jobs")]
        jobs: usize,
        #[arg(short = 'm', long = "machines")]
        machines: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a schedule file against an instance file.
    Verify {
        instance: PathBuf,
        schedule: PathBuf,
        /// Treat a non-contiguous allotment as a violation.
        #[arg(long)]
        contiguous: bool,
    },
    /// Run a benchmark grid and write one CSV row per point.
    Bench {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// SVG trend plot of wall time.
        #[arg(long)]
        plot: Option<PathBuf>,
        #[arg(long, env = "MOLDABLE_WORKERS")]
        workers: Option<usize>,
    },
}

fn read(path: &Path) -> Result<String, i32> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        exit::IO
    })
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), i32> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", p.display());
            exit::IO
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance, i32> {
    let text = read(path)?;
    let inst = parse_instance(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        exit::BAD_INPUT
    })?;
    let violations = validate_instance(&inst);
    if !violations.is_empty() {
        eprintln!("error: {} is not a valid instance", path.display());
        for v in violations {
            eprintln!("  {v}");
        }
        return Err(exit::BAD_INPUT);
    }
    Ok(inst)
}

fn cmd_solve(instance: &Path, epsilon: &Rat, out: Option<&Path>, gantt: Option<&Path>) -> Result<(), i32> {
    let inst = load_instance(instance)?;
    let started = Instant::now();
    let result = solve(&inst, epsilon).map_err(|e| match e {
        SolveError::Invariant(v) => {
            eprintln!("error: {v}");
            eprintln!("{}", v.dump);
            exit::INVARIANT
        }
        other => {
            eprintln!("error: {other}");
            exit::BAD_INPUT
        }
    })?;
    eprintln!(
        "makespan {} (~{:.6}), accepted d {}, lambda {}, {} guesses, {:.1} ms",
        result.makespan,
        result.makespan.to_f64(),
        result.accepted_d,
        result.lambda_used,
        result.iterations,
        started.elapsed().as_secs_f64() * 1e3
    );
    if let Some(path) = gantt {
        emit(Some(path), &render_gantt(&inst, &result.schedule))?;
    }
    let rec = ScheduleRecord {
        schedule: result.schedule,
        lambda: result.lambda_used,
        accepted_d: result.accepted_d,
    };
    emit(out, &write_schedule(&inst, &rec))
}

fn cmd_gen(n: usize, m: usize, seed: u64, out: Option<&Path>) -> Result<(), i32> {
    let inst = generate(&GenConfig::new(n, m, seed)).map_err(|e| {
        eprintln!("error: {e}");
        exit::BAD_INPUT
    })?;
    emit(out, &write_instance(&inst))
}

fn cmd_verify(instance: &Path, schedule: &Path, contiguous: bool) -> Result<(), i32> {
    let inst = load_instance(instance)?;
    let text = read(schedule)?;
    let rec = parse_schedule(&inst, &text).map_err(|e| {
        eprintln!("error: {}: {e}", schedule.display());
        exit::BAD_INPUT
    })?;
    let report = validate_schedule(&inst, &rec.schedule, contiguous);
    if report.ok() {
        println!("feasible, makespan {} (~{:.6})", report.makespan, report.makespan.to_f64());
        return Ok(());
    }
    println!("{} violation(s)", report.violations.len());
    for v in &report.violations {
        let ids: Vec<String> = v.jobs.iter().map(|&j| inst.jobs[j].id.to_string()).collect();
        let mut line = format!("  {:?}: jobs [{}]", v.kind, ids.join(", "));
        if let Some(k) = v.machine {
            line.push_str(&format!(", machine {k}"));
        }
        if let Some((a, b)) = &v.window {
            line.push_str(&format!(", window [{a}, {b}]"));
        }
        println!("{line}");
    }
    Err(exit::INFEASIBLE)
}

fn cmd_bench(config: &Path, out: Option<&Path>, plot: Option<&Path>, workers: Option<usize>) -> Result<(), i32> {
    let text = read(config)?;
    let points = BenchConfig::parse(&text)
        .map_err(|e: FormatError| e.to_string())
        .and_then(|c| c.points())
        .map_err(|e| {
            eprintln!("error: {}: {e}", config.display());
            exit::BAD_INPUT
        })?;
    let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let rows = run_bench(&points, workers).map_err(|e| {
        eprintln!("error: thread pool: {e}");
        exit::IO
    })?;
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).map_err(|e| {
        eprintln!("error: csv: {e}");
        exit::IO
    })?;
    emit(out, &String::from_utf8(buf).expect("csv output is utf-8"))?;
    if let Some(path) = plot {
        emit(Some(path), &plot_trend(&rows))?;
    }
    let failed = rows.iter().filter(|r| r.status != "ok").count();
    eprintln!("{} points, {} failed", rows.len(), failed);
    if failed > 0 {
        return Err(exit::INVARIANT);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { instance, epsilon, out, gantt } => cmd_solve(instance, epsilon, out.as_deref(), gantt.as_deref()),
        Command::Gen { jobs, machines, seed, out } => cmd_gen(*jobs, *machines, *seed, out.as_deref()),
        Command::Verify { instance, schedule, contiguous } => cmd_verify(instance, schedule, *contiguous),
        Command::Bench { config, out, plot, workers } => cmd_bench(config, out.as_deref(), plot.as_deref(), *workers),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code as u8),
    }
}
