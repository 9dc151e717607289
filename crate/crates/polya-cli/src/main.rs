use std::io::{stderr, stdout, BufWriter, Write};

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let mut out = BufWriter::new(stdout());
    let code = polya_cli::commands::run(&argv, &mut out, &mut stderr());
    let _ = out.flush();
    drop(out);
    std::process::exit(code);
}
