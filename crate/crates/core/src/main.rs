fn main() -> std::process::ExitCode {
    mythos::cli::main()
}
