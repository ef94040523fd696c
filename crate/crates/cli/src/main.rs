fn main() {
    std::process::exit(qge_cli::run(std::env::args_os()));
}
