use std::process::ExitCode;

fn main() -> ExitCode {
    hermite_detrep::cli::main()
}
