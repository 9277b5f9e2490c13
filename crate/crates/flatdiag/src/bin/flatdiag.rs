fn main() {
    std::process::exit(flatdiag::cli::run(std::env::args_os()));
}
