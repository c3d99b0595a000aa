use clap::Parser;

fn main() {
    let cli = eisgor::cli::Cli::parse();
    std::process::exit(eisgor::cli::run(cli));
}
