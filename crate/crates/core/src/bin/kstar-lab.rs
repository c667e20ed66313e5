fn main() {
    std::process::exit(kstar_lab::cli::main_with_args(std::env::args_os()));
}
