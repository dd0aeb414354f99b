fn main() {
    std::process::exit(padjust::cli::run());
}
