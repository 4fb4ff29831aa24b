use std::process::ExitCode;

fn main() -> ExitCode {
    cone_lab::cli::run(std::env::args_os())
}
