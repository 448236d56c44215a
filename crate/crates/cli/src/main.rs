use clap::Parser;

use selberg_lab::{configure_threads, run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = configure_threads(cli.threads).and_then(|()| run(&cli)) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
