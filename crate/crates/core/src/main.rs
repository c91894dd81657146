fn main() {
    std::process::exit(regiso::cli::run(std::env::args().collect()));
}
