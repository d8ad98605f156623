fn main() {
    std::process::exit(xxzlab::cli::run(std::env::args()));
}
