use std::io::{self, IsTerminal, Write};

fn main() {
    let terminal = io::stdout().is_terminal();
    let outcome = antichain_box::cli::run(std::env::args_os(), &mut io::stdin().lock(), terminal);
    let _ = io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = io::stderr().write_all(outcome.stderr.as_bytes());
    std::process::exit(outcome.code);
}
