use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use prc_core::stats::Proportion;
use prc_core::watermark::{generate_plain, generate_seeded, GenerationRecord};
use prc_core::RngStream;
use prc_tools::dynamic::load_key_file;
use prc_tools::harness::{labels, write_report, Cell};
use prc_tools::records::{parse_model, read_lines, write_lines, RecordLine};
use prc_tools::{Result, ToolError};

/// Watermark toy-model outputs with a pseudorandom code and detect them.
#[derive(Parser)]
#[command(name = "watermark", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate records; watermarked unless `--plain`.
    Generate {
        /// `constant:P`, `sinusoidal:CENTER,AMPLITUDE,PERIOD` or `hash:LO,HI,WINDOW`.
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "")]
        prompt: String,
        /// Key file from `prc keygen`.
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        plain: bool,
    },
    /// Decode every record and write ONE rates per record kind.
    Detect {
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("watermark: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate {
            model,
            prompt,
            scheme,
            out,
            count,
            seed,
            plain,
        } => {
            let toy = parse_model(&model)?;
            let keyed = load_key_file(&scheme)?.keyed;
            let stream = RngStream::new(seed, 5);
            let prompt = prompt.into_bytes();
            let mut lines = Vec::new();
            for i in 0..count {
                let mut rng = stream.child(i).rng();
                let record = if plain {
                    let z = generate_plain(toy.as_ref(), &prompt, keyed.codeword_len(), &mut rng)?;
                    GenerationRecord::plain(&prompt, z)
                } else {
                    let x = keyed.encode(&mut rng);
                    let z = generate_seeded(toy.as_ref(), &prompt, &x, &mut rng)?;
                    GenerationRecord {
                        prompt: prompt.clone(),
                        z,
                        x,
                    }
                };
                lines.push(RecordLine::new(&toy.name(), &record));
            }
            write_lines(&out, &lines)?;
        }
        Command::Detect {
            scheme,
            input,
            report,
        } => {
            let keyed = load_key_file(&scheme)?.keyed;
            let lines: Vec<RecordLine> = read_lines(&input)?;
            let mut marked = Proportion::new(0, 0);
            let mut plain = Proportion::new(0, 0);
            for line in &lines {
                let record = line.record()?;
                let one = u64::from(keyed.decode(&record.z)?.is_one());
                let p = Proportion::new(one, 1);
                if record.is_watermarked() {
                    marked = marked.merge(p);
                } else {
                    plain = plain.merge(p);
                }
            }
            let mut cells = Vec::new();
            for (kind, p) in [("watermarked", marked), ("plain", plain)] {
                if p.trials > 0 {
                    println!("{kind}: {} of {} detected", p.successes, p.trials);
                    cells.push(Cell::from_proportion(labels([("records", kind.into())]), p));
                }
            }
            let file = std::fs::File::create(&report).map_err(|e| ToolError::io(&report, e))?;
            write_report(&cells, file)?;
        }
    }
    Ok(())
}
