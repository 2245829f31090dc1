fn main() -> std::process::ExitCode {
    interlace_lab::cli::main()
}
