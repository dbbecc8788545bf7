fn main() {
    std::process::exit(driftwatch_cli::run(std::env::args_os()));
}
