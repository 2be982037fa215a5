fn main() {
    std::process::exit(qnmc_cli::main_with(std::env::args_os()));
}
