fn main() {
    std::process::exit(majorant_cli::main_with_args(std::env::args_os()));
}
