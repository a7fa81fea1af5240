use clap::Parser;

fn main() {
    let cli = ofbm::cli::Cli::parse();
    std::process::exit(ofbm::cli::run(&cli));
}
