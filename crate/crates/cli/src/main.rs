fn main() {
    std::process::exit(ers_cli::cli::main());
}
