fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(p1chain::cli::run(&args));
}
