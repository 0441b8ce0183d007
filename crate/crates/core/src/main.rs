fn main() {
    std::process::exit(ddmor::cli::run(std::env::args_os()));
}
