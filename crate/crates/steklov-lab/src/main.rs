fn main() {
    std::process::exit(steklov_lab::cli::run(std::env::args_os()));
}
