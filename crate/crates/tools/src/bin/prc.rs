use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use prc_core::stats::Proportion;
use prc_core::RngStream;
use prc_tools::config::{AmplifyConfig, BaseParams, ChannelConfig, ParamsFile, SchemeName};
use prc_tools::dynamic::{key_file, load_key_file};
use prc_tools::harness::{
    distinguisher_suite, labels, run_experiment, write_report, Cell, ExperimentConfig, Mode, Source,
};
use prc_tools::records::{read_lines, write_lines, CodewordLine};
use prc_tools::runner::Runner;
use prc_tools::{Result, ToolError};

/// Keys, codewords, channels and Monte Carlo experiments for the
/// pseudorandom codes in prc-core.
#[derive(Parser)]
#[command(name = "prc", version)]
struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SchemeArgs {
    #[arg(long)]
    scheme: SchemeName,
    /// JSON parameter file.
    #[arg(long)]
    params: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a key pair and write it as a key file.
    Keygen {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write codewords under a key, one JSON line each.
    Encode {
        #[arg(long)]
        key: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of codewords.
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pass codewords through a channel.
    Corrupt {
        #[arg(long = "in")]
        input: PathBuf,
        /// `bsc:P`, `hyp:D`, `hyp-rate:R`, `adv:P,STRATEGY` or a JSON object.
        #[arg(long)]
        channel: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode strings; prints one verdict per line.
    Decode {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        /// Optional CSV summary of the ONE rate.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate alpha and delta of the base scheme and the repetition count.
    Calibrate {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Calibration trials per key.
        #[arg(long, default_value_t = 20_000)]
        trials: u64,
        /// Overrides the channel of the parameter file.
        #[arg(long)]
        channel: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a (swept) decode-rate or soundness experiment.
    Experiment {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Decode)]
        mode: ModeArg,
        /// Fill the seconds column.
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the distinguisher battery against codewords of a key.
    Distinguish {
        #[arg(long)]
        key: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Samples per side.
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Use the secret parity for the fixed-parity test.
        #[arg(long)]
        secret_parity: bool,
        /// Compare uniform strings against uniform strings instead.
        #[arg(long)]
        null: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Decode,
    Soundness,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("prc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn runner(workers: Option<usize>) -> Result<Runner> {
    let n = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    Runner::new(n)
}

fn create(path: &Path) -> Result<std::fs::File> {
    std::fs::File::create(path).map_err(|e| ToolError::io(path, e))
}

fn run(cli: Cli) -> Result<()> {
    let runner = runner(cli.workers)?;
    match cli.command {
        Command::Keygen { scheme, seed, out } => {
            let params = ParamsFile::load(scheme.scheme, &scheme.params)?;
            let keyed = params.scheme.keygen(RngStream::new(seed, 0))?;
            let doc = key_file(scheme.scheme.as_str(), &params.doc, keyed.as_ref());
            let text = serde_json::to_string_pretty(&doc).expect("key file serializes");
            std::fs::write(&out, text + "\n").map_err(|e| ToolError::io(&out, e))?;
            println!(
                "{}: codeword length {}",
                keyed.scheme_name(),
                keyed.codeword_len()
            );
        }
        Command::Encode {
            key,
            seed,
            trials,
            out,
        } => {
            let keyed = load_key_file(&key)?.keyed;
            let stream = RngStream::new(seed, 1);
            let lines: Vec<CodewordLine> = runner
                .map_chunks(trials, 64, |range| {
                    range
                        .map(|i| CodewordLine::new(&keyed.encode(&mut stream.child(i).rng())))
                        .collect::<Vec<_>>()
                })
                .into_iter()
                .flatten()
                .collect();
            write_lines(&out, &lines)?;
        }
        Command::Corrupt {
            input,
            channel,
            seed,
            out,
        } => {
            let channel = ChannelConfig::parse(&channel)?;
            let stream = RngStream::new(seed, 2);
            let lines: Vec<CodewordLine> = read_lines(&input)?;
            let corrupted = lines
                .iter()
                .enumerate()
                .map(|(i, line)| {
                    let y = channel.apply(&line.bits()?, &mut stream.child(i as u64).rng())?;
                    Ok(CodewordLine::new(&y))
                })
                .collect::<Result<Vec<_>>>()?;
            write_lines(&out, &corrupted)?;
        }
        Command::Decode { key, input, out } => {
            let keyed = load_key_file(&key)?.keyed;
            let lines: Vec<CodewordLine> = read_lines(&input)?;
            let mut ones = 0;
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            for line in &lines {
                let verdict = keyed.decode(&line.bits()?)?;
                ones += u64::from(verdict.is_one());
                let _ = writeln!(w, "{}", if verdict.is_one() { "ONE" } else { "BOT" });
            }
            if let Some(out) = out {
                let p = Proportion::new(ones, lines.len() as u64);
                write_report(
                    &[Cell::from_proportion(
                        labels([("verdict", "one".into())]),
                        p,
                    )],
                    create(&out)?,
                )?;
            }
        }
        Command::Calibrate {
            scheme,
            seed,
            trials,
            channel,
            out,
        } => {
            let params = ParamsFile::load(scheme.scheme, &scheme.params)?;
            let mut spec = params.scheme.clone();
            let previous = spec.amplify.take();
            if let Some(text) = &channel {
                spec.default_channel = ChannelConfig::parse(text)?;
            }
            spec.amplify = Some(AmplifyConfig {
                repetitions: previous.as_ref().and_then(|a| a.repetitions),
                alpha: None,
                delta: None,
                channel: if channel.is_some() {
                    None
                } else {
                    previous.and_then(|a| a.channel)
                },
                calibration_trials: trials,
            });
            let root = RngStream::new(seed, 3);
            let mut alpha = Proportion::new(0, 0);
            let mut delta = Proportion::new(0, 0);
            for k in 0..params.keys {
                let keyed = spec.keygen(root.child(k))?;
                let cal = keyed.calibration().expect("calibration ran");
                alpha = alpha.merge(cal.alpha);
                delta = delta.merge(cal.delta);
            }
            let t = match spec.amplify.as_ref().and_then(|a| a.repetitions) {
                Some(t) => t,
                None => prc_core::stats::chernoff_repetitions(alpha.estimate(), delta.estimate()),
            };
            println!(
                "alpha {:.5}, delta {:.5}, repetitions {t}",
                alpha.estimate(),
                delta.estimate()
            );
            let cells = [
                Cell::from_proportion(labels([("quantity", "alpha".into())]), alpha),
                Cell::from_proportion(labels([("quantity", "delta".into())]), delta),
                Cell::value(
                    labels([("quantity", "repetitions".into())]),
                    t as f64,
                    alpha.trials,
                ),
            ];
            write_report(&cells, create(&out)?)?;
        }
        Command::Experiment {
            scheme,
            seed,
            trials,
            mode,
            timing,
            out,
        } => {
            let cfg = ExperimentConfig {
                scheme: scheme.scheme,
                params: ParamsFile::load(scheme.scheme, &scheme.params)?,
                trials,
                seed,
                mode: match mode {
                    ModeArg::Decode => Mode::Decode,
                    ModeArg::Soundness => Mode::Soundness,
                },
                timing,
            };
            let cells = run_experiment(&cfg, &runner, &out)?;
            println!("{} cells written to {}", cells.len(), out.display());
        }
        Command::Distinguish {
            key,
            seed,
            trials,
            secret_parity,
            null,
            out,
        } => {
            let loaded = load_key_file(&key)?;
            let keyed = loaded.keyed.as_ref();
            let weak = match loaded.params.scheme.base {
                BaseParams::WeakXor(p) if loaded.params.scheme.amplify.is_none() => Some(p),
                _ => None,
            };
            let source = if null {
                Source::Uniform {
                    len: keyed.codeword_len(),
                    matrix_dims: weak.map(|p| (p.n, p.m)),
                }
            } else {
                Source::Codewords {
                    keyed,
                    matrices: weak,
                }
            };
            let fixed = if secret_parity {
                Some(keyed.secret_parity().ok_or_else(|| {
                    ToolError::Config(format!(
                        "{} keys have no secret parity",
                        keyed.scheme_name()
                    ))
                })?)
            } else {
                None
            };
            let table =
                distinguisher_suite(&source, trials, fixed, RngStream::new(seed, 4), &runner)?;
            let mut cells = Vec::new();
            for a in &table {
                println!(
                    "{:<22} advantage {:.5}  difference {:+.5} in [{:+.5}, {:+.5}]",
                    a.test,
                    a.advantage(),
                    a.difference,
                    a.ci_lo,
                    a.ci_hi
                );
                cells.push(Cell {
                    labels: labels([("test", a.test.to_string())]),
                    estimate: a.difference,
                    ci: Some((a.ci_lo, a.ci_hi)),
                    trials: a.samples,
                    seconds: None,
                });
            }
            write_report(&cells, create(&out)?)?;
        }
    }
    Ok(())
}
