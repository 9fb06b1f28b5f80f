use clap::Parser;

fn main() {
    std::process::exit(iteb::cli::run(iteb::cli::Cli::parse()));
}
