use std::process::exit;

fn main() {
    exit(snet::cli::run(std::env::args_os()));
}
