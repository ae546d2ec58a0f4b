use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(mfapc::main_with_args(std::env::args_os()))
}
