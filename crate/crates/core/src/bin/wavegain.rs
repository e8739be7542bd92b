fn main() {
    std::process::exit(wavegain::cli::run(std::env::args_os()));
}
