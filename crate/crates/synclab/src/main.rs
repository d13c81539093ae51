fn main() {
    std::process::exit(synclab::cli::run());
}
