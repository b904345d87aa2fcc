use clap::Parser;

fn main() {
    let cli = continuum_sim::cli::Cli::parse();
    std::process::exit(continuum_sim::cli::run(cli));
}
