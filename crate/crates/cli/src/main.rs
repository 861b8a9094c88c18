fn main() {
    std::process::exit(lans_cli::run(std::env::args_os()));
}
