use std::io::IsTerminal;
use std::process::ExitCode;

use compocheck::cli;

fn main() -> ExitCode {
    let color = cli::color_from_env(
        std::env::var("COMPOCHECK_COLOR").ok().as_deref(),
        std::io::stdout().is_terminal(),
    );
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = cli::main_with(std::env::args_os(), color, &mut stdout.lock(), &mut stderr.lock());
    ExitCode::from(code as u8)
}
