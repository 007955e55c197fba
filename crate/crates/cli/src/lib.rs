//! Command-line front end for the `boundaryk` toolkit: the expression
//! language for targets, the certificate cache, and the subcommands.

pub mod app;
pub mod cache;
pub mod expr;

pub use app::{run, EXIT_ERROR, EXIT_OK, EXIT_UNKNOWN};
pub use expr::{parse_expression, Atom, Expression, Term};
