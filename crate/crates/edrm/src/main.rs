fn main() {
    std::process::exit(edrm::cli::run(std::env::args_os()));
}
