use std::process::ExitCode;

fn main() -> ExitCode {
    gmflow::cli::main_with_args(std::env::args_os())
}
