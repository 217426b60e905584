use std::process::ExitCode;

use clap::Parser;
use wavelet_asym::Cli;

fn main() -> ExitCode {
    let arguments: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match wavelet_asym::run(&cli, &arguments) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wavelet-asym: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
