mod args;
mod commands;
mod output;

use std::io::{self, Write};
use std::process::ExitCode;

use arithdyn::factorint::Effort;
use clap::Parser;

use args::Cli;
use commands::Ctx;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        precision: cli.precision,
        effort: Effort::new(cli.trial_bound, cli.rho_iterations),
    };
    match commands::run(&cli.command, &ctx) {
        Ok(report) => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            match report.write(cli.output, &mut out).and_then(|_| out.flush()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("{}", serde_json::json!({"error": {"module": "io", "message": e.to_string()}}));
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            let err = serde_json::json!({"error": {"module": e.module(), "message": e.to_string()}});
            eprintln!("{err}");
            ExitCode::from(1)
        }
    }
}
