fn main() {
    std::process::exit(hspace::cli::run(std::env::args_os()));
}
