fn main() {
    std::process::exit(multifield::cli::main_with_args(std::env::args_os()));
}
