fn main() {
    std::process::exit(bigbuyer::cli::run(std::env::args_os()));
}
