fn main() {
    std::process::exit(kcayley::cli::run(std::env::args_os()));
}
