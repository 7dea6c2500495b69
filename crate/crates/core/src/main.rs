use clap::Parser;
use node2coords::cli::{exit_code, run, Cli};

fn main() {
    let result = run(Cli::parse());
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    std::process::exit(exit_code(&result));
}
