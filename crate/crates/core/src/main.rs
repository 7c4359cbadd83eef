use std::process::ExitCode;

fn main() -> ExitCode {
    qdm::cli::main()
}
