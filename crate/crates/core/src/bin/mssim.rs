use std::process::ExitCode;

fn main() -> ExitCode {
    multistable::cli::main_with_args(std::env::args_os())
}
