use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use matfac_cli::{run, Flags, ProblemDoc};

#[derive(Parser)]
#[command(name = "matfac", version, about = "Verify matrix factorization problem documents")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute the commands of a document.
    Run {
        doc: PathBuf,
        /// Jet order for commands working modulo a degree.
        #[arg(long)]
        precision: Option<u32>,
        /// Use the k-th power of the canonical primitive root.
        #[arg(long, allow_hyphen_values = true)]
        zeta: Option<i64>,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
        /// Also write the machine report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print a document in canonical form.
    Fmt { doc: PathBuf },
}

fn load(path: &PathBuf) -> Result<ProblemDoc, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    ProblemDoc::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match cli.command {
        Cmd::Run {
            doc,
            precision,
            zeta,
            format,
            report,
        } => {
            let parsed = match load(&doc) {
                Ok(d) => d,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let r = match run(&parsed, &Flags { precision, zeta }) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {}: {e}", doc.display());
                    return ExitCode::from(2);
                }
            };
            if let Some(path) = report {
                if let Err(e) = std::fs::write(&path, r.machine()) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            match format {
                Format::Human => print!("{}", r.human()),
                Format::Machine => print!("{}", r.machine()),
            }
            ExitCode::from(r.exit_status as u8)
        }
        Cmd::Fmt { doc } => match load(&doc).and_then(|d| d.canonical().map_err(|e| e.to_string())) {
            Ok(c) => {
                print!("{}", c.to_json());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
