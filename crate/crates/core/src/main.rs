fn main() {
    std::process::exit(qaoa_lab::cli::main_with_args(std::env::args_os()));
}
