fn main() {
    std::process::exit(nullcore::cli::run(std::env::args_os()));
}
