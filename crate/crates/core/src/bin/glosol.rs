fn main() {
    std::process::exit(glosol::cli::main_with_args(std::env::args_os()));
}
