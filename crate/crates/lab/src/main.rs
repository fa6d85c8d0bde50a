fn main() {
    env_logger::init();
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(critlab::cli::run(&argv));
}
