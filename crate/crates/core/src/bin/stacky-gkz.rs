use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, text) = stacky_gkz::cli::run(std::env::args_os());
    let mut out = std::io::stdout().lock();
    if out.write_all(text.as_bytes()).and_then(|()| out.flush()).is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(code as u8)
}
