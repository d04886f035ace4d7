fn main() -> std::process::ExitCode {
    cusp::cli::main()
}
