use clap::Parser;

fn main() {
    let cli = transmission_cli::Cli::parse();
    std::process::exit(transmission_cli::run(cli));
}
