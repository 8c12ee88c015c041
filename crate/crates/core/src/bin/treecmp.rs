fn main() {
    std::process::exit(treecmp::cli::run(std::env::args_os()));
}
