use std::process::ExitCode;

fn main() -> ExitCode {
    let mut out = std::io::stdout();
    let mut err = std::io::stderr();
    let code = cusick::cli::run(std::env::args_os(), &mut out, &mut err);
    ExitCode::from(code.clamp(0, 255) as u8)
}
