use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = regulus_cli::main_with_args(std::env::args_os());
    if out.code == 2 {
        eprint!("{}", out.text);
    } else {
        print!("{}", out.text);
        let _ = std::io::stdout().flush();
    }
    ExitCode::from(out.code)
}
