fn main() {
    std::process::exit(bohmsim::cli::main_with(std::env::args_os()));
}
