//! Types, terms, formulas and the s-expression surface syntax.

pub mod alpha;
pub mod ast;
pub mod gen;
pub mod parse;
pub mod print;
pub mod sexp;
pub mod typing;

pub use alpha::{alpha_eq, alpha_eq_blocks, alpha_eq_term, free_vars, substitute};
pub use ast::*;
pub use parse::{parse_document, parse_formula, parse_term, parse_type, ParseError};
pub use print::{print_document, print_formula, print_term, print_type};
pub use typing::{check_formula, infer_type, Ctx, TypeError};
