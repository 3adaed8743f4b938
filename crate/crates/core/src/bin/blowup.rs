fn main() -> std::process::ExitCode {
    blowup::cli::main()
}
