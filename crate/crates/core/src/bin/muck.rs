fn main() {
    std::process::exit(muckenhoupt::cli::main_with_args(std::env::args_os()));
}
