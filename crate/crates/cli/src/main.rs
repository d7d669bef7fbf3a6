use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = embedcap_cli::Cli::parse();
    if let Err(e) = embedcap_cli::run(cli, &args) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
