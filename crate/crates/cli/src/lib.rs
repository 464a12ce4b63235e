//! Command-line front end: configuration, orchestration and export.

pub mod config;
pub mod export;
pub mod run;

use std::ffi::OsString;

pub use config::{parse_args, ConfigError, Format, Mode, RunConfig};
pub use run::{run, RunError};

/// Caps the rayon pool at `IONOSPEC_THREADS` when set.
fn configure_threads() -> Result<(), ConfigError> {
    let Ok(v) = std::env::var("IONOSPEC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| ConfigError(format!("IONOSPEC_THREADS must be a positive integer, got `{v}`")))?;
    // A pool built earlier in the same process stays in place.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs the program on `args` (including the program name) and returns the exit status.
pub fn main_with<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let matches = match config::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let result = configure_threads()
        .map_err(RunError::from)
        .and_then(|()| config::from_matches(&matches).map_err(RunError::from))
        .and_then(|cfg| run(&cfg));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
