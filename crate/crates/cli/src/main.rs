use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use probsmooth::codec;
use probsmooth::harness::{run_experiment, write_svg, ExperimentConfig};
use probsmooth::lab::fuzz::{draw, run_fuzz, FuzzPlan, Lemma};
use probsmooth::lab::sweep_bounds;
use probsmooth::models::{schedule_fixed, ModelKind, ModelSpec};
use probsmooth::{Alphabet, Error, Execution};

#[derive(Parser, Debug)]
#[command(
    name = "probsmooth",
    version,
    about = "Compress with online probability models and test their redundancy bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compress a file, treating each byte as a letter
    Compress {
        input: PathBuf,
        output: PathBuf,
        /// UNIFORM, PS1, PS2, KT, KT-CS, KT-H, KT-R or PTW-KT
        #[arg(long, default_value = "PS2")]
        model: String,
        /// Smoothing rate for PS1 [default: tuned to the input length]
        #[arg(long)]
        alpha: Option<f64>,
        /// Share factor for PS1 [default: tuned to the input length]
        #[arg(long)]
        eps: Option<f64>,
        /// Alphabet size; every input byte must be below it
        #[arg(long, default_value_t = 256)]
        alphabet: usize,
    },
    /// Restore a file written by `compress`
    Decompress { input: PathBuf, output: PathBuf },
    /// Average redundancy of several models on random piecewise stationary sources
    Experiment {
        /// Config file of `key = value` lines [default: built-in defaults]
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write an SVG plot next to the CSV
        #[arg(long)]
        plot: bool,
        /// Print the resolved config and exit
        #[arg(long)]
        dry_run: bool,
    },
    /// Check measured redundancy against both closed-form bounds on random cases
    VerifyBounds {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1024)]
        t: u64,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Multiplies both bounds before comparing
        #[arg(long, default_value_t = 1.0, hide = true)]
        bound_scale: f64,
    },
    /// Randomized check of the per-step inequalities behind the bounds
    FuzzLemmas {
        #[arg(long, default_value_t = 100_000)]
        iterations: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Replay one instance of --lemma from its reported seed
        #[arg(long, requires = "lemma")]
        replay: Option<u64>,
        #[arg(long, requires = "replay")]
        lemma: Option<String>,
    },
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn check(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. } | Error::Format(_) | Error::Truncated(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult = Result<(), Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| {
        Error::Io {
            path: path.into(),
            source: e,
        }
        .into()
    })
}

fn write(path: &Path, bytes: &[u8]) -> CliResult {
    std::fs::write(path, bytes).map_err(|e| {
        Error::Io {
            path: path.into(),
            source: e,
        }
        .into()
    })
}

fn compress(
    input: &Path,
    output: &Path,
    model: &str,
    alpha: Option<f64>,
    eps: Option<f64>,
    alphabet: usize,
) -> CliResult {
    let kind: ModelKind = model.parse()?;
    let a = Alphabet::new(alphabet)?;
    let data = read(input)?;
    let len = data.len() as u64;
    let mut spec = kind.configure(a, len.max(1))?;
    if alpha.is_some() || eps.is_some() {
        if kind != ModelKind::Ps1 {
            return Err(Failure::usage("--alpha and --eps only apply to PS1"));
        }
        let (a0, e0) = schedule_fixed(a, len.max(2))?;
        spec = ModelSpec::PsFixed {
            alpha: alpha.unwrap_or(a0),
            eps: eps.unwrap_or(e0),
        };
    }
    let x: Vec<usize> = data.iter().map(|&b| b as usize).collect();
    if let Some(&big) = x.iter().find(|&&b| b >= alphabet) {
        return Err(Failure::usage(format!(
            "input byte {big} does not fit alphabet size {alphabet}"
        )));
    }
    let stream = codec::encode(&spec, a, &x)?;
    write(output, &stream)?;
    let bpl = if x.is_empty() {
        0.0
    } else {
        8.0 * stream.len() as f64 / x.len() as f64
    };
    println!(
        "{} -> {} bytes ({:.4} bits/letter, model {})",
        x.len(),
        stream.len(),
        bpl,
        kind
    );
    Ok(())
}

fn decompress(input: &Path, output: &Path) -> CliResult {
    let stream = read(input)?;
    let (_, x) = codec::decode(&stream)?;
    let bytes = x
        .iter()
        .map(|&a| u8::try_from(a))
        .collect::<Result<Vec<u8>, _>>()
        .map_err(|_| Failure::usage("stream holds letters that are not bytes"))?;
    write(output, &bytes)?;
    println!("{} -> {} bytes", stream.len(), bytes.len());
    Ok(())
}

fn experiment(config: Option<&Path>, plot: bool, dry_run: bool) -> CliResult {
    let cfg = match config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if dry_run {
        print!("{cfg}");
        return Ok(());
    }
    let start = Instant::now();
    let table = run_experiment(&cfg, Execution::default())?;
    table.write_csv(&cfg.output)?;
    println!(
        "{} rows written to {} in {:.1}s",
        table.rows().len(),
        cfg.output.display(),
        start.elapsed().as_secs_f64()
    );
    if plot {
        let svg = cfg.output.with_extension("svg");
        write_svg(&table, &svg)?;
        println!("plot written to {}", svg.display());
    }
    Ok(())
}

fn verify_bounds(n: usize, t: u64, samples: u64, seed: u64, scale: f64) -> CliResult {
    let a = Alphabet::new(n)?;
    if t < 2 {
        return Err(Failure::usage("--t must be at least 2"));
    }
    let summary = sweep_bounds(samples, seed, scale, Execution::default(), |_| (a, t))?;
    let (fixed, varying) = summary.worst_slack();
    println!("checked {} samples (N={n}, T={t})", summary.len());
    if !summary.is_empty() {
        println!("worst slack, fixed parameters:   {fixed:.6} nats");
        println!("worst slack, varying parameters: {varying:.6} nats");
    }
    let bad: Vec<String> = summary
        .fixed_violations()
        .map(|o| {
            format!(
                "fixed bound violated: seed {} measured {} bound {}",
                o.seed, o.fixed.measured, o.fixed.bound
            )
        })
        .chain(summary.varying_violations().map(|o| {
            format!(
                "varying bound violated: seed {} measured {} bound {}",
                o.seed, o.varying.measured, o.varying.bound
            )
        }))
        .collect();
    if bad.is_empty() {
        println!("all bounds hold");
        Ok(())
    } else {
        Err(Failure::check(bad.join("\n")))
    }
}

fn fuzz_lemmas(iterations: u64, seed: u64) -> CliResult {
    let report = run_fuzz(
        FuzzPlan::from_iterations(iterations),
        seed,
        Execution::default(),
    )?;
    println!(
        "{:<20} {:>10} {:>10} {:>14}",
        "lemma", "instances", "violations", "min slack"
    );
    for s in &report.stats {
        println!(
            "{:<20} {:>10} {:>10} {:>14.6e}",
            s.lemma.name(),
            s.instances,
            s.violations,
            s.min_slack
        );
    }
    let bad: Vec<String> = report
        .stats
        .iter()
        .filter(|s| s.violations > 0)
        .map(|s| match s.failing_seed {
            Some(f) => format!(
                "{} violated; replay with --replay {f} --lemma {}",
                s.lemma, s.lemma
            ),
            None => format!("{} violated", s.lemma),
        })
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::check(bad.join("\n")))
    }
}

fn replay(lemma: &str, seed: u64) -> CliResult {
    let lemma = Lemma::ALL
        .into_iter()
        .find(|l| l.name() == lemma)
        .ok_or_else(|| Failure::usage(format!("unknown lemma {lemma:?}")))?;
    let instance = draw(lemma, seed);
    let check = instance.check()?;
    println!("{instance:?}");
    println!(
        "lhs {} rhs {} slack {}",
        check.lhs,
        check.rhs,
        check.slack()
    );
    if check.ok {
        Ok(())
    } else {
        Err(Failure::check(format!("{lemma} violated")))
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Compress {
            input,
            output,
            model,
            alpha,
            eps,
            alphabet,
        } => compress(&input, &output, &model, alpha, eps, alphabet),
        Command::Decompress { input, output } => decompress(&input, &output),
        Command::Experiment {
            config,
            plot,
            dry_run,
        } => experiment(config.as_deref(), plot, dry_run),
        Command::VerifyBounds {
            n,
            t,
            samples,
            seed,
            bound_scale,
        } => verify_bounds(n, t, samples, seed, bound_scale),
        Command::FuzzLemmas {
            replay: Some(s),
            lemma: Some(l),
            ..
        } => replay(&l, s),
        Command::FuzzLemmas {
            iterations, seed, ..
        } => fuzz_lemmas(iterations, seed),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
