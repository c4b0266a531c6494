use clap::Parser;
use odn_sparsify_cli::{configure_threads, run, Cli, EXIT_ERROR};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap exits with 2 on usage errors, which here means a violation
            std::process::exit(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    configure_threads();
    std::process::exit(run(&cli));
}
