fn main() {
    std::process::exit(mtqc::cli::run(std::env::args().collect()));
}
