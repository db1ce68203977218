use std::io::{self, Write};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mut out = io::stdout().lock();
    let mut err = io::stderr().lock();
    let code = fraccalc_cli::run_cli(&args, &mut out, &mut err);
    let _ = out.flush();
    let _ = err.flush();
    std::process::exit(code);
}
