fn main() {
    std::process::exit(catalytic_erasure::cli::run(std::env::args_os()));
}
