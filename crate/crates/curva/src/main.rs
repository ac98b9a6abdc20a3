use std::process::ExitCode;

use clap::Parser;

use curva::cli::{error_report, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, code) = match run(&cli.command) {
        Ok(o) => (o.report, o.exit),
        Err(e) => {
            eprintln!("{}", error_report(&e));
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = serde_json::to_string_pretty(&report).expect("reports are plain JSON");
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(4);
            }
        }
        None => println!("{text}"),
    }
    ExitCode::from(code as u8)
}
