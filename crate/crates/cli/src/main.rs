fn main() {
    std::process::exit(ionospec_cli::main_with(std::env::args_os()));
}
