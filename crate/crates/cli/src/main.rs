use clap::Parser;
use superatom_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            println!("{}: wrote {} files to {}", cli.command.name(), out.files.len() + 1, out.dir.display());
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            std::process::exit(e.exit_code());
        }
    }
}
