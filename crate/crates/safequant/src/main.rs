fn main() {
    std::process::exit(safequant::cli::run());
}
