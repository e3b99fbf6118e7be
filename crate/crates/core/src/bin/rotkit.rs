fn main() {
    std::process::exit(rotkit::cli::run(std::env::args_os()));
}
