fn main() {
    std::process::exit(qtamper_cli::run(std::env::args_os()));
}
