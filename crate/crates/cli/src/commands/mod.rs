pub mod coeffs;
pub mod sweep;
pub mod tradeoff;
pub mod verify;

use crate::{Cli, Command, Failure};

/// Runs the parsed command, returning its output text and, separately, a
/// failure that should be reported after the text is written.
pub fn dispatch(cli: &Cli) -> Result<(String, Result<(), Failure>), Failure> {
    let shared = &cli.shared;
    let text = match &cli.command {
        Command::Coeffs { schemes } => coeffs::run(shared, schemes)?,
        Command::Sweep {
            scheme,
            axis,
            start,
            stop,
            step,
        } => sweep::run(shared, scheme, *axis, *start, *stop, *step)?,
        Command::Tradeoff {
            schemes,
            snr1_db,
            start,
            stop,
            step,
            mode,
        } => tradeoff::run(shared, schemes, *snr1_db, (*start, *stop, *step), *mode)?,
        Command::Verify { profile, replace } => return verify::run(shared, *profile, replace),
    };
    Ok((text, Ok(())))
}
