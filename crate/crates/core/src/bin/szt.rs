use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use szt_core::construction::Construction;
use szt_core::geometry::{write_lines, write_points};
use szt_core::harness::{self, Config, ExperimentReport, RunOptions};
use szt_core::Result;

// Output to a closed pipe (e.g. `| head`) is not an error worth a panic.
macro_rules! say {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "szt", version, about = "Exact rich-line constructions over nice bases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build P and L, auto-tuning c1 if asked, and write the report.
    Construct(RunArgs),
    /// Run the exact claim verifiers and print their findings.
    Verify(RunArgs),
    /// Run an r_list or n_list sweep and fit the log-log slope.
    Sweep(RunArgs),
    /// Cross-check L against the brute-force rich lines of P.
    Oracle(RunArgs),
    /// Randomized arithmetic, GAP closure and line property suites.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; nothing is written without it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism). 1 also selects the
    /// reference line generator.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    dump_points: bool,
    #[arg(long)]
    dump_lines: bool,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Record wall-clock phase timings (makes outputs machine-dependent).
    #[arg(long)]
    timings: bool,
}

impl RunArgs {
    fn load(&self) -> Result<(Config, RunOptions)> {
        let mut config = Config::from_path(&self.config)?;
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        let opts = RunOptions {
            workers: self.workers,
            timings: self.timings,
        };
        Ok((config, opts))
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Construct(args) => {
            let (config, opts) = args.load()?;
            let outcome = harness::run(&config, &opts)?;
            summarize(&outcome.report);
            emit(&args, &outcome.report, &outcome.construction)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let (config, opts) = args.load()?;
            let outcome = harness::run(&config, &opts)?;
            let c = &outcome.construction;
            summarize(&outcome.report);
            say!(
                "claim 2: {} of {} lines are {}-rich (min richness {})",
                c.claim2.num_rich, c.claim2.num_lines, c.params.r, c.claim2.min_richness
            );
            if let Some((line, k)) = &c.claim2.failure {
                say!("  witness: {line} has {k} points");
            }
            let m = &c.claim2.mechanism;
            say!(
                "  p_t check: {} lines, {} points, {} off their line, {} in P",
                m.lines_sampled, m.points_checked, m.off_line, m.in_pointset
            );
            say!(
                "translates: disjoint {}, nearest pairs disjoint {}, spacing inequality {}, contained {}",
                c.disjointness.disjoint,
                c.disjointness.nearest_translates_disjoint,
                c.disjointness.spacing_inequality,
                c.geometry.translates_contained
            );
            emit(&args, &outcome.report, c)?;
            let ok = c.claim2.all_rich() && c.disjointness.disjoint && c.claim2.mechanism.off_line == 0;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Sweep(args) => {
            let (config, opts) = args.load()?;
            let outcome = harness::sweep(&config, &opts)?;
            for r in &outcome.reports {
                summarize(r);
            }
            let fit = &outcome.fit;
            say!(
                "fit: slope {:.4}, intercept {:.4}, rate band {:.3} over {} points",
                fit.slope, fit.intercept, fit.rate_claim4_band, fit.points
            );
            match &args.out {
                Some(dir) => harness::write_sweep(dir, &outcome)?,
                None => harness::write_csv(std::io::stdout().lock(), &outcome.reports)?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle(args) => {
            let (config, opts) = args.load()?;
            let outcome = harness::oracle(&config, &opts)?;
            summarize(&outcome.report);
            let o = outcome.report.oracle.as_ref().expect("oracle ran");
            say!(
                "oracle: {} rich lines; family {} lines; subset {}; coverage {:.4}",
                o.oracle_lines, o.family_lines, o.subset, o.coverage
            );
            if let Some(line) = &o.missing {
                say!("  not rich in P: {line}");
            }
            emit(&args, &outcome.report, &outcome.construction)?;
            Ok(if o.subset { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Selftest { seed, samples, out } => {
            let results = harness::selftest(seed, samples)?;
            for r in &results {
                let status = if r.passed() { "ok" } else { "FAILED" };
                say!("{:<17} {:<28} {:>6} samples  {status}", r.suite, r.basis, r.samples);
                if let Some(why) = &r.first_failure {
                    say!("  {why}");
                }
            }
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                harness::write_json(&dir.join("selftest.json"), &results)?;
            }
            let ok = results.iter().all(|r| r.passed());
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

fn summarize(r: &ExperimentReport) {
    say!(
        "{} n={} |P|={} alpha={} r={} c1={} (steps {}): |L|={} frac_rich={} I={} rates {:.4} {:.4} {:.4}",
        r.basis,
        r.n_nominal,
        r.p_realized,
        r.alpha,
        r.r,
        r.c1,
        r.tune_steps,
        r.num_lines,
        r.frac_r_rich,
        r.incidences,
        r.rate_claim4,
        r.rate_claim3,
        r.rate_claim1
    );
}

fn emit(args: &RunArgs, report: &ExperimentReport, c: &Construction) -> Result<()> {
    let Some(dir) = &args.out else {
        return Ok(());
    };
    std::fs::create_dir_all(dir)?;
    harness::write_json(&dir.join("report.json"), report)?;
    harness::write_csv(std::fs::File::create(dir.join("report.csv"))?, std::slice::from_ref(report))?;
    if args.dump_points {
        write_points(create(dir, "points.txt")?, &c.pointset.points)?;
        match harness::embedded_points(c) {
            Some(xy) => {
                let mut w = create(dir, "points_embedded.csv")?;
                writeln!(w, "x,y")?;
                for (x, y) in xy {
                    writeln!(w, "{x},{y}")?;
                }
            }
            None => eprintln!("note: the embedding is not real; skipping points_embedded.csv"),
        }
    }
    if args.dump_lines {
        write_lines(create(dir, "lines.txt")?, &c.family.lines)?;
    }
    Ok(())
}

fn create(dir: &Path, name: &str) -> Result<std::io::BufWriter<std::fs::File>> {
    Ok(std::io::BufWriter::new(std::fs::File::create(dir.join(name))?))
}
