fn main() {
    std::process::exit(hpbem_cli::run(std::env::args_os()));
}
