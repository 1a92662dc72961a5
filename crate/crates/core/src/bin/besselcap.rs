fn main() {
    std::process::exit(besselcap::cli::main_with_args(std::env::args_os()));
}
