fn main() {
    std::process::exit(pmm::cli::run(std::env::args_os()));
}
