fn main() {
    std::process::exit(stochtame::cli::main_from_env());
}
