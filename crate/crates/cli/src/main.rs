use std::io::{self, BufRead};

fn main() {
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let input: &mut dyn BufRead = &mut input;
    let code = clwork_cli::run(std::env::args_os(), input, &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
