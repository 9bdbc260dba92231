fn main() {
    std::process::exit(delcards::cli::main_with_args(std::env::args_os()));
}
