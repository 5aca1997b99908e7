fn main() {
    std::process::exit(reqlens_cli::run(std::env::args_os()));
}
