fn main() {
    std::process::exit(helium_qc::cli::run(std::env::args_os()));
}
