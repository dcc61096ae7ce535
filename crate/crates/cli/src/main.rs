fn main() {
    std::process::exit(apekit_cli::run(std::env::args_os()));
}
