use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = coqatoo::cli::main_with(
        std::env::args_os().skip(1),
        &mut io::stdin().lock(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}
