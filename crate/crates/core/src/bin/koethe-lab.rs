fn main() {
    std::process::exit(koethe_lab::cli::main_with_args(std::env::args_os()));
}
