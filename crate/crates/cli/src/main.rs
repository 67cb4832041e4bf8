fn main() {
    std::process::exit(motifgnn_cli::run(std::env::args_os()));
}
