fn main() {
    std::process::exit(paramp_cli::run_from(std::env::args_os()));
}
