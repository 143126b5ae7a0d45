fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(pinchlab::cli::run(&args));
}
