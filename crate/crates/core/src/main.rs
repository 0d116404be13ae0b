fn main() {
    std::process::exit(shadowlab::cli::run(std::env::args_os()));
}
