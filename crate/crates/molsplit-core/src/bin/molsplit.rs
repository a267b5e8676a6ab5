use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(molsplit_core::cli::run(std::env::args()) as u8)
}
