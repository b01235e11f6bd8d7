fn main() {
    std::process::exit(tcnot_lab::cli::run(std::env::args_os()));
}
