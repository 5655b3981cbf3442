use std::io::{self, BufReader};

fn main() {
    let stdin = io::stdin();
    let mut input = BufReader::new(stdin.lock());
    let code = lapsep::cli::run(std::env::args_os(), &mut input, &mut io::stdout().lock(), &mut io::stderr().lock());
    std::process::exit(code);
}
