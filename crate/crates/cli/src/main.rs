use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(qrwr_cli::run(std::env::args_os()))
}
