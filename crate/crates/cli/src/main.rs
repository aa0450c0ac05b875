//! `boostcav` command-line interface.

mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use args::Command;
use clap::error::ErrorKind;

/// Caps rayon's pool when `BOOSTCAV_THREADS` is set.
fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("BOOSTCAV_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("BOOSTCAV_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match args::parse(std::env::args_os().collect()) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }

    let result = match &cli.command {
        Command::Static(a) => commands::cmd_static(a),
        Command::Boost(a) => commands::cmd_boost(a),
        Command::Sweep(a) => commands::cmd_sweep(a),
        Command::Rect2d(a) => commands::cmd_rect2d(a),
        Command::Verify(a) => commands::cmd_verify(a),
        Command::Modes(a) => commands::cmd_modes(a),
    };
    let report = match result {
        Ok(r) => r,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(commands::exit_code(&err));
        }
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }

    let text = report.table.render(cli.format);
    let written = match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        eprintln!("error: cannot write output: {msg}");
        return ExitCode::from(2);
    }
    if report.failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
