fn main() {
    std::process::exit(peakwave::cli::run(std::env::args_os()));
}
