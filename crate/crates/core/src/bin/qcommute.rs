use anyhow::Context;
use qcommute::cli;

fn main() {
    let code = match cli::run(std::env::args_os()).context("qcommute") {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            err.downcast_ref::<qcommute::Error>().map(cli::exit_code).unwrap_or(cli::EXIT_USAGE)
        }
    };
    std::process::exit(code);
}
