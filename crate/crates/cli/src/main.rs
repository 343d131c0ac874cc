mod cli;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use cli::Cli;
use output::{cache_key, cache_load, cache_store, render};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let args: Vec<String> = std::env::args().skip(1).collect();
    let key = cache_key(&args, std::env::var("GROWTHCALC_TOL").ok().as_deref());
    if let Some(dir) = &cli.run.cache_dir {
        if let Some((exit, text)) = cache_load(dir, &key) {
            print!("{text}");
            return ExitCode::from(exit);
        }
    }
    match commands::run(&cli) {
        Ok(report) => {
            let text = render(&report, cli.run.format, cli.run.digits);
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
            if let Some(dir) = &cli.run.cache_dir {
                if let Err(e) = cache_store(dir, &key, report.exit, &text) {
                    eprintln!("warning: cache not written: {e}");
                }
            }
            ExitCode::from(report.exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
