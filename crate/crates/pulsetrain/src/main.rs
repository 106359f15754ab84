use std::fs;
use std::io::{Read as _, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use pulsetrain::claims::{lookup, ClaimParams, ClaimReport};
use pulsetrain::designer::build_train;
use pulsetrain::integrator::{evolve, extract_p2_max, IntegratorConfig};
use pulsetrain::model::{PulseShape, StateVector, TimeSeries, TrainSpec};
use pulsetrain::{analytic, Error};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

const EXIT_CLAIM_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_GRID: u8 = 3;

#[derive(Parser)]
#[command(name = "pulsetrain", version, about = "Three-state population transfer by trains of coincident pulse pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ShapeArg {
    Gaussian,
    Rect,
}

#[derive(Subcommand)]
enum Command {
    /// Print a train specification as JSON.
    Design {
        /// Number of pulse pairs.
        #[arg(long)]
        pairs: usize,
        #[arg(long, value_enum, default_value_t = ShapeArg::Gaussian)]
        shape: ShapeArg,
        /// Pulse width T (Gaussian) or duration (rect), in time units.
        #[arg(long, default_value_t = 1.0)]
        width: f64,
        /// Distance between consecutive pair centers.
        #[arg(long, default_value_t = 6.0)]
        spacing: f64,
        /// Per-pair rms pulse area in radians.
        #[arg(long, default_value_t = TWO_PI)]
        area: f64,
        /// Comma-separated mixing angles in radians; defaults to the optimal schedule.
        #[arg(long)]
        angles: Option<String>,
    },
    /// Integrate a train and emit a CSV time series plus a JSON summary.
    Simulate {
        /// Train JSON file, or "-" for standard input.
        #[arg(long)]
        train: String,
        /// Loss rate Gamma; overrides the value in the train file.
        #[arg(long)]
        gamma: Option<f64>,
        /// Time step; overrides the value in the train file.
        #[arg(long)]
        dt: Option<f64>,
        /// CSV output path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Summary JSON path; printed to standard output when omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Optional gnuplot script reproducing the envelope/population layout.
        #[arg(long)]
        gnuplot: Option<PathBuf>,
    },
    /// Check a registered claim; exits 0 iff all checks pass.
    Verify {
        /// One of: p2max, optimal-angles, crosscheck, equal-maxima.
        #[arg(long)]
        claim: String,
        #[arg(long)]
        pairs: usize,
        #[arg(long)]
        grid_points: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// CSV of transient-P2 and final-P3 figures over a range of train lengths.
    Sweep {
        #[arg(long)]
        pairs_from: usize,
        #[arg(long)]
        pairs_to: usize,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
    },
}

fn round_to(x: f64, decimals: i32) -> f64 {
    let f = 10f64.powi(decimals);
    (x * f).round() / f
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::GridTooCoarse { .. } => EXIT_GRID,
        _ => EXIT_INVALID,
    }
}

fn cmd_design(
    pairs: usize,
    shape: ShapeArg,
    width: f64,
    spacing: f64,
    area: f64,
    angles: Option<String>,
) -> Result<(), u8> {
    let shape = match shape {
        ShapeArg::Gaussian => PulseShape::Gaussian { width },
        ShapeArg::Rect => PulseShape::Rect { duration: width },
    };
    let parsed: Option<Vec<f64>> = match angles {
        None => None,
        Some(s) => {
            let list: Result<Vec<f64>, _> = s.split(',').map(|a| a.trim().parse::<f64>()).collect();
            match list {
                Ok(v) => Some(v),
                Err(e) => {
                    eprintln!("error: cannot parse --angles: {e}");
                    return Err(EXIT_INVALID);
                }
            }
        }
    };
    let mut train = build_train(pairs, &shape, spacing, area, parsed.as_deref()).map_err(|e| {
        eprintln!("error: {e}");
        exit_code_for(&e)
    })?;
    for pair in &mut train.pairs {
        pair.theta = round_to(pair.theta, 7);
    }
    println!("{}", serde_json::to_string_pretty(&train).expect("train serializes"));
    Ok(())
}

fn read_train(path: &str) -> Result<TrainSpec, u8> {
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(|e| {
            eprintln!("error: cannot read standard input: {e}");
            EXIT_INVALID
        })?;
        buf
    } else {
        fs::read_to_string(path).map_err(|e| {
            eprintln!("error: cannot read train file {path}: {e}");
            EXIT_INVALID
        })?
    };
    let train: TrainSpec = serde_json::from_str(&text).map_err(|e| {
        eprintln!("error: cannot parse train JSON: {e}");
        EXIT_INVALID
    })?;
    train.validate().map_err(|e| {
        eprintln!("error: {e}");
        EXIT_INVALID
    })?;
    Ok(train)
}

fn write_csv(series: &TimeSeries, out: Option<&PathBuf>) -> Result<(), u8> {
    let mut text = String::from("t,omega_p,omega_s,P1,P2,P3,norm2\n");
    for r in &series.rows {
        text.push_str(&format!(
            "{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
            r.t, r.omega_p, r.omega_s, r.p1, r.p2, r.p3, r.norm_sq
        ));
    }
    match out {
        Some(path) => fs::write(path, text).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
            EXIT_INVALID
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn gnuplot_script(csv: &str) -> String {
    format!(
        "# Envelopes (top) and populations (bottom), two-row layout.\n\
         set datafile separator ','\n\
         set multiplot layout 2,1\n\
         set xlabel 't / T'\n\
         set ylabel 'Rabi frequency'\n\
         plot '{csv}' using 1:2 skip 1 with lines title 'Omega_p', \\\n\
         \x20    '{csv}' using 1:3 skip 1 with lines title 'Omega_s'\n\
         set ylabel 'population'\n\
         set yrange [0:1]\n\
         plot '{csv}' using 1:4 skip 1 with lines title 'P1', \\\n\
         \x20    '{csv}' using 1:5 skip 1 with lines title 'P2', \\\n\
         \x20    '{csv}' using 1:6 skip 1 with lines title 'P3'\n\
         unset multiplot\n"
    )
}

fn cmd_simulate(
    train_path: &str,
    gamma: Option<f64>,
    dt: Option<f64>,
    out: Option<PathBuf>,
    summary: Option<PathBuf>,
    gnuplot: Option<PathBuf>,
) -> Result<(), u8> {
    let mut train = read_train(train_path)?;
    if let Some(g) = gamma {
        train.gamma = g;
    }
    if let Some(step) = dt {
        train.grid.dt = step;
    }
    train.validate().map_err(|e| {
        eprintln!("error: {e}");
        EXIT_INVALID
    })?;
    let config = IntegratorConfig::new(train.grid.dt);
    let series = evolve(&train, &config, &StateVector::ground()).map_err(|e| {
        eprintln!("error: {e}");
        exit_code_for(&e)
    })?;
    write_csv(&series, out.as_ref())?;

    let last = series.last().expect("series is non-empty");
    let (p2_max, per_pair) = extract_p2_max(&series, &train);
    let summary_json = json!({
        "final": {
            "P1": round_to(last.p1, 6),
            "P2": round_to(last.p2, 6),
            "P3": round_to(last.p3, 6),
        },
        "p2_max": round_to(p2_max, 6),
        "per_pair_p2_max": per_pair.iter().map(|m| round_to(*m, 6)).collect::<Vec<_>>(),
        "lost": round_to(1.0 - last.norm_sq, 6),
        "norm2": round_to(last.norm_sq, 6),
    });
    let text = serde_json::to_string_pretty(&summary_json).expect("summary serializes");
    match summary {
        Some(path) => fs::write(&path, text).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
            EXIT_INVALID
        })?,
        None => println!("{text}"),
    }
    if let Some(path) = gnuplot {
        let csv_name = out
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "pulsetrain.csv".to_string());
        fs::write(&path, gnuplot_script(&csv_name)).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
            EXIT_INVALID
        })?;
    }
    Ok(())
}

fn print_report(report: &ClaimReport) {
    for check in &report.checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!(
            "{status} [{claim}] {label} (|observed| = {obs:.3e}, tolerance = {tol:.3e})",
            claim = report.claim,
            label = check.label,
            obs = check.observed.abs(),
            tol = check.tolerance,
        );
    }
    let blob = json!({
        "claim": report.claim,
        "passed": report.passed(),
        "checks": report.checks.iter().map(|c| json!({
            "label": c.label,
            "observed": c.observed,
            "tolerance": c.tolerance,
            "passed": c.passed,
        })).collect::<Vec<_>>(),
    });
    println!("{}", serde_json::to_string(&blob).expect("report serializes"));
}

fn cmd_verify(claim: &str, pairs: usize, grid_points: Option<usize>, dt: Option<f64>) -> Result<(), u8> {
    let Some(check) = lookup(claim) else {
        eprintln!("error: unknown claim '{claim}'");
        return Err(EXIT_INVALID);
    };
    let params = ClaimParams { pairs, grid_points, dt };
    let report = check.run(&params).map_err(|e| {
        eprintln!("error: {e}");
        exit_code_for(&e)
    })?;
    print_report(&report);
    if report.passed() {
        Ok(())
    } else {
        Err(EXIT_CLAIM_FAILED)
    }
}

fn cmd_sweep(pairs_from: usize, pairs_to: usize, gamma: f64) -> Result<(), u8> {
    if pairs_from == 0 || pairs_to < pairs_from {
        eprintln!("error: need 1 <= pairs-from <= pairs-to");
        return Err(EXIT_INVALID);
    }
    let shape = PulseShape::Gaussian { width: 1.0 };
    let mut out = std::io::stdout().lock();
    writeln!(out, "N,p2_max_analytic,p2_max_numeric,final_P3_lossless,final_P3_lossy").ok();
    for n in pairs_from..=pairs_to {
        let run = |g: f64| -> Result<(f64, f64), Error> {
            let mut train = build_train(n, &shape, 6.0, TWO_PI, None)?;
            train.gamma = g;
            let series = evolve(&train, &IntegratorConfig::new(train.grid.dt), &StateVector::ground())?;
            let (p2_max, _) = extract_p2_max(&series, &train);
            Ok((p2_max, series.last().expect("non-empty").p3))
        };
        let analytic_bound = analytic::p2_max_bound(n).map_err(|e| {
            eprintln!("error: {e}");
            exit_code_for(&e)
        })?;
        let (p2_numeric, p3_lossless) = run(0.0).map_err(|e| {
            eprintln!("error: {e}");
            exit_code_for(&e)
        })?;
        let (_, p3_lossy) = run(gamma).map_err(|e| {
            eprintln!("error: {e}");
            exit_code_for(&e)
        })?;
        writeln!(
            out,
            "{n},{:.6},{:.6},{:.6},{:.6}",
            analytic_bound, p2_numeric, p3_lossless, p3_lossy
        )
        .ok();
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Design { pairs, shape, width, spacing, area, angles } => {
            cmd_design(pairs, shape, width, spacing, area, angles)
        }
        Command::Simulate { train, gamma, dt, out, summary, gnuplot } => {
            cmd_simulate(&train, gamma, dt, out, summary, gnuplot)
        }
        Command::Verify { claim, pairs, grid_points, dt } => cmd_verify(&claim, pairs, grid_points, dt),
        Command::Sweep { pairs_from, pairs_to, gamma } => cmd_sweep(pairs_from, pairs_to, gamma),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}
