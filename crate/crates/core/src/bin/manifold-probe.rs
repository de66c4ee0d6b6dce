fn main() {
    std::process::exit(manifold_probe::cli::run(std::env::args_os()));
}
