use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(flashx::main_with_args(std::env::args_os()))
}
