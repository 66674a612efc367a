use clap::Parser;

fn main() {
    let cli = gatree::cli::Cli::parse();
    std::process::exit(gatree::cli::run(cli));
}
