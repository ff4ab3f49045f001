fn main() {
    std::process::exit(presym::cli::run(std::env::args_os()));
}
