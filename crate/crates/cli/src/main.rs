use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(collapse_cli::run(std::env::args_os()))
}
