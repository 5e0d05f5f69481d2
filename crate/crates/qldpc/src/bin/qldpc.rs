fn main() {
    std::process::exit(qldpc::cli::run(std::env::args_os()));
}
