fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(sqprime::cli::run(&argv));
}
