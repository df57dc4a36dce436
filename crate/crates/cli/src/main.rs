use clap::Parser;
use voicemark_cli::{run, Cli, EXIT_FATAL};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FATAL
        }
    };
    std::process::exit(code);
}
