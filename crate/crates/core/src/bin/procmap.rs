fn main() {
    std::process::exit(procmap::cli::run(std::env::args_os()));
}
