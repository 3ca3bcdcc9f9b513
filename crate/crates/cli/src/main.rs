fn main() {
    std::process::exit(mvcs_cli::run(std::env::args_os()));
}
