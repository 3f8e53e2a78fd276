use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = qfb_cli::Cli::parse();
    let result = qfb_cli::run(
        cli,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
