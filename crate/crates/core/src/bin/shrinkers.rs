fn main() {
    std::process::exit(shrinkers::cli::run(std::env::args_os()));
}
