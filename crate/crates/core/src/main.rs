fn main() -> std::process::ExitCode {
    tracepair::cli::main()
}
