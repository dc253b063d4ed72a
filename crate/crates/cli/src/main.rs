use clap::Parser;
use kerrsplit_cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = execute(&cli, &mut stdout) {
        eprintln!("error: category={} message={}", e.category(), e);
        std::process::exit(e.exit_code());
    }
}
