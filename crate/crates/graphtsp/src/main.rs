fn main() {
    std::process::exit(graphtsp::cli::run());
}
