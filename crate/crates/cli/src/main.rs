use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = ltp_cli::Cli::parse();
    match ltp_cli::run(cli) {
        Ok(out) => {
            match &out.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &out.text) {
                        eprintln!("error: writing {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{}", out.text),
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
