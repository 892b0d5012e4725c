fn main() {
    std::process::exit(coham::cli::main_with_args(std::env::args_os()));
}
