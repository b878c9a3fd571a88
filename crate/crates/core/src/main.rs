fn main() {
    std::process::exit(commonfix::cli::run_from(std::env::args_os()));
}
