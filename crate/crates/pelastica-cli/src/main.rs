use std::process::ExitCode;

use clap::Parser;

use pelastica_cli::cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = cli.resolve().and_then(|cfg| pelastica_cli::run(&cfg));
    match outcome {
        Ok(o) => {
            println!("{}", o.manifest.display());
            for label in &o.nonconverged {
                eprintln!("warning: {label} did not reach the tolerance");
            }
            ExitCode::from(o.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
