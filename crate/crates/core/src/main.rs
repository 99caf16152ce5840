fn main() {
    std::process::exit(parity_distill::cli::run(std::env::args_os()));
}
