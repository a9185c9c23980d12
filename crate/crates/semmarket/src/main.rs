//! Thin binary entry point; all behavior lives in the library's `cli`
//! module so it stays testable.

fn main() {
    std::process::exit(semmarket::cli::run());
}
