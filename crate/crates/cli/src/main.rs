use clap::Parser;

fn main() {
    let cli = holoheis_cli::Cli::parse();
    std::process::exit(holoheis_cli::run(&cli));
}
