fn main() {
    std::process::exit(gerf::harness::cli::run_cli(std::env::args()));
}
