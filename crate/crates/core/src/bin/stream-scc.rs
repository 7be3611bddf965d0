fn main() -> std::process::ExitCode {
    stream_scc::cli::main()
}
