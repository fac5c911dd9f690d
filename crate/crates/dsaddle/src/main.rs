fn main() -> std::process::ExitCode {
    dsaddle::cli::main()
}
