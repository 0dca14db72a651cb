fn main() {
    std::process::exit(rlattice::cli::run(std::env::args_os()));
}
