fn main() {
    std::process::exit(sigpipe::cli::run(std::env::args_os()));
}
