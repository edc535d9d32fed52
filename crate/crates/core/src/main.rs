fn main() {
    std::process::exit(geotomo::cli::run(std::env::args().collect()));
}
