fn main() {
    std::process::exit(qratchet_cli::run(std::env::args_os()));
}
