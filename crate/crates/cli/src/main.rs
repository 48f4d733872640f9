use std::process::ExitCode;

use bicm_cli::Failure;

fn main() -> ExitCode {
    let mut stdout = std::io::stdout().lock();
    match bicm_cli::run(std::env::args_os(), &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Clap(e)) => {
            let _ = e.print();
            ExitCode::from(e.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
