use clap::Parser;
use pauliz_cli::{emit, run, Cli};

fn main() {
    let cli = Cli::parse();
    let common = cli.common.clone();
    let result = run(cli).and_then(|out| emit(&common, &out));
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
