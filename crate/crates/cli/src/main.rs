use clap::Parser;
use ergm_cli::commands::{run, Cli};
use ergm_cli::error::{classify, ExitCode};

fn main() -> std::process::ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // help and version requests are not failures
            let code = if e.use_stderr() { ExitCode::Config } else { ExitCode::Success };
            return std::process::ExitCode::from(code as u8);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return std::process::ExitCode::from(ExitCode::Config as u8);
        }
    }
    match run(cli) {
        Ok(()) => std::process::ExitCode::from(ExitCode::Success as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::ExitCode::from(classify(&e) as u8)
        }
    }
}
