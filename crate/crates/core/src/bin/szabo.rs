use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use szabo::analyzer::{
    cmd_analyze, cmd_dimensions, cmd_generate, dimensions_text, exit, exit_code, AnalyzeConfig,
    TensorFile,
};
use szabo::space::Signature;
use szabo::{Error, Result};

#[derive(Parser)]
#[command(
    name = "szabo",
    version,
    about = "Szabó operator analysis for covariant derivative curvature tensors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random tensor projected onto the symmetry class.
    Generate {
        #[arg(long, value_parser = parse_signature)]
        signature: Signature,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Analyse a tensor file.
    Analyze {
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 10.0)]
        bound: f64,
        /// Fail unless the file has this signature.
        #[arg(long, value_parser = parse_signature)]
        signature: Option<Signature>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print exact dimensions of the symmetry classes and Szabó-map kernels.
    Dimensions {
        #[arg(long, default_value_t = 5)]
        max_m: usize,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn parse_signature(s: &str) -> std::result::Result<Signature, String> {
    let (p, q) = s.split_once(',').ok_or("expected P,Q")?;
    let p = p.trim().parse().map_err(|_| format!("bad p '{p}'"))?;
    let q = q.trim().parse().map_err(|_| format!("bad q '{q}'"))?;
    Signature::new(p, q).map_err(|e| e.to_string())
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Generate {
            signature,
            seed,
            scale,
            output,
        } => {
            let file = cmd_generate(signature, seed, scale)?;
            emit(&file.to_text(), output.as_ref())?;
            Ok(exit::CLEAN)
        }
        Command::Analyze {
            input,
            seed,
            samples,
            tol,
            bound,
            signature,
            output,
            format,
        } => {
            let file = TensorFile::read(&input)?;
            if let Some(s) = signature {
                if s != file.signature {
                    return Err(Error::Precondition(format!(
                        "file has signature {}, expected {s}",
                        file.signature
                    )));
                }
            }
            let mut cfg = AnalyzeConfig::new(samples, seed);
            cfg.sampling = cfg.sampling.with_tol(tol).with_bound(bound);
            let report = cmd_analyze(&file, &cfg)?;
            let body = match format {
                Format::Text => report.to_text(),
                Format::Structured => report.to_json() + "\n",
            };
            emit(&body, output.as_ref())?;
            Ok(report.exit_code())
        }
        Command::Dimensions {
            max_m,
            output,
            format,
        } => {
            let rows = cmd_dimensions(max_m)?;
            let body = match format {
                Format::Text => dimensions_text(&rows),
                Format::Structured => serde_json::to_string_pretty(&rows).expect("finite") + "\n",
            };
            emit(&body, output.as_ref())?;
            Ok(exit::CLEAN)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::CLEAN
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
