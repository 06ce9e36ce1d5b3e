fn main() {
    std::process::exit(randstate_cli::main_with(std::env::args_os().skip(1)));
}
