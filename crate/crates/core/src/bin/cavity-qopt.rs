fn main() {
    std::process::exit(cavity_qopt::cli::run(std::env::args_os()));
}
