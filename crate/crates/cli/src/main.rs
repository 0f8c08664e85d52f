use clap::Parser;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let cli = dpg_cli::Cli::parse();
    if let Err(e) = dpg_cli::run(cli, args) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
