fn main() {
    std::process::exit(hconsist::cli::run_from(std::env::args_os()));
}
