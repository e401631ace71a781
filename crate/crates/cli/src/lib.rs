//! Expression language and command-line front end for `filterlab`.

pub mod dsl;
pub mod elab;
pub mod run;

pub use dsl::{parse, ParseError, Program};
pub use run::{run, run_with, Outcome};
