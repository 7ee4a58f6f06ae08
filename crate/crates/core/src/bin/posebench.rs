fn main() {
    std::process::exit(posebench::cli::run(std::env::args_os()));
}
