//! Command-line front end for `polya`, plus brute-force oracles and the
//! acceptance suites shared by `polya verify` and the `acceptance` test target.

pub mod brute;
pub mod commands;
pub mod verify;

use polya::Error;

/// Stack size for threads that sample or recurse over large structures.
pub const STACK: usize = 512 << 20;

/// Environment variable holding the default truncation degree.
pub const TRUNC_ENV: &str = "POLYA_TRUNC";

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INADMISSIBLE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Unsupported(_) => EXIT_USAGE,
        Error::Syntax { .. }
        | Error::Sort(_)
        | Error::Inadmissible(_)
        | Error::NotWellFounded(_)
        | Error::Divergent(_)
        | Error::Numeric(_)
        | Error::ImpossibleTarget(_) => EXIT_INADMISSIBLE,
        Error::Internal(_) => EXIT_INTERNAL,
    }
}
