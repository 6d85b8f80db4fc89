fn main() {
    std::process::exit(nslen::cli::run(std::env::args_os()));
}
