//! Thin binary wrapper around [`heqed::cli::run`].

fn main() {
    std::process::exit(heqed::cli::run(std::env::args()));
}
