use std::process::ExitCode;

fn main() -> ExitCode {
    telegraph_cli::main_with(std::env::args_os())
}
