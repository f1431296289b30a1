use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let env = std::env::var(hpsym_cli::THREADS_ENV).ok();
    let code = hpsym_cli::main_with(std::env::args_os(), env.as_deref(), &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
