fn main() {
    std::process::exit(goncurve::cli::run());
}
