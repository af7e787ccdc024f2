fn main() {
    std::process::exit(envcontour::cli::main_with_args(std::env::args_os()));
}
