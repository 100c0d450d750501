fn main() {
    std::process::exit(pfx::cli::run(std::env::args_os()));
}
