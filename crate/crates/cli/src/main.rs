use clap::Parser;
use pronylab_cli::{exit, init_threads, run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e:#}");
        std::process::exit(exit::FAILURE);
    }
    let code = run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
