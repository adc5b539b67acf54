fn main() {
    std::process::exit(nzflow::cli::run(std::env::args_os()));
}
