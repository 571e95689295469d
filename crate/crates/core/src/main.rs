fn main() {
    std::process::exit(spinsel::cli::main_with_args(std::env::args_os()));
}
