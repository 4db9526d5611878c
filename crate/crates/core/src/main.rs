use clap::Parser;

fn main() {
    let cli = torzeta::cli::Cli::parse();
    if let Err(e) = torzeta::cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
