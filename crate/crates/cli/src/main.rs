use clap::Parser;

fn main() {
    let cli = relay_simplify::Cli::parse();
    match relay_simplify::run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(relay_simplify::exit_code_for(&err));
        }
    }
}
