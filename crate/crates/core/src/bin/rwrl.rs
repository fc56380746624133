fn main() -> std::process::ExitCode {
    rwrl::cli::main()
}
