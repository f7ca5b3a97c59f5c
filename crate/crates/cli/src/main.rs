use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, stdout, stderr) = uhlmann_cli::run(std::env::args_os());
    print!("{stdout}");
    eprint!("{stderr}");
    ExitCode::from(code as u8)
}
