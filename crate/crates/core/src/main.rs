fn main() {
    std::process::exit(stedit::cli::main_with_args(std::env::args_os()));
}
