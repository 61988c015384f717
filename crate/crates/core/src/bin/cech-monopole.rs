fn main() {
    std::process::exit(cech_monopole::cli::main_with_args(std::env::args_os()));
}
