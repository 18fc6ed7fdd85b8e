fn main() {
    std::process::exit(neon_coherence::cli::run(std::env::args_os()));
}
