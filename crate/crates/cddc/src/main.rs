fn main() {
    std::process::exit(cddc::cli::main_with_args(std::env::args_os()));
}
