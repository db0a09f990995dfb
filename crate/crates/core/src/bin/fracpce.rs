fn main() {
    std::process::exit(fracpce::cli::run_from(std::env::args_os()));
}
