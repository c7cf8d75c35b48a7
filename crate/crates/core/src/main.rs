fn main() {
    std::process::exit(stablepoly::cli::run(std::env::args_os()));
}
