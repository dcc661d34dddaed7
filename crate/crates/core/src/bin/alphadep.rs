fn main() {
    std::process::exit(alphadep::cli::run_command(std::env::args_os()));
}
