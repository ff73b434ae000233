fn main() {
    std::process::exit(codedcomp::cli::main_with_args(std::env::args_os()));
}
