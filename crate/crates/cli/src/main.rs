fn main() {
    std::process::exit(apcl_cli::main_with_args(std::env::args_os()));
}
