mod args;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("DOCHAR_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().map_err(|_| format!("DOCHAR_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("DOCHAR_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let out = match commands::run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Err(e) = commands::emit(cli.output.as_deref(), &out.text) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if out.status == 3 {
        eprintln!("warning: at least one shell had more than 1% failed samples");
    }
    ExitCode::from(out.status as u8)
}
