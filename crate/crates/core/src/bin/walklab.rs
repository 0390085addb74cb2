fn main() {
    std::process::exit(walklab::cli::run(std::env::args_os()));
}
