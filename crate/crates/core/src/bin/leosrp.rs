fn main() {
    std::process::exit(leosrp::cli::run(std::env::args_os()));
}
