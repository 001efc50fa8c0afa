fn main() {
    std::process::exit(syk_replica::cli::run_from(std::env::args_os()));
}
