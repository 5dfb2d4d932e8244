fn main() {
    std::process::exit(speckle_core::cli::run());
}
