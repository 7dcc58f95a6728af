fn main() {
    std::process::exit(kobdyn::cli::run());
}
