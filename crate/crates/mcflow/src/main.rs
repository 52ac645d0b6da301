fn main() {
    std::process::exit(mcflow::cli::run_cli(std::env::args().skip(1).collect()));
}
