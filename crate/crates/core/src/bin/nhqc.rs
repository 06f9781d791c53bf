fn main() {
    std::process::exit(nhqc::cli::run(std::env::args_os()));
}
