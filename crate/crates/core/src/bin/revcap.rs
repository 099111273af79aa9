fn main() {
    std::process::exit(revcap::cli::run(std::env::args_os()));
}
