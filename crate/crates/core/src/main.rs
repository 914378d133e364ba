fn main() {
    std::process::exit(peelmap::cli::run(std::env::args_os()));
}
