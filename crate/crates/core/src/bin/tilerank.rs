fn main() {
    std::process::exit(tilerank::cli::main_with_env_args());
}
