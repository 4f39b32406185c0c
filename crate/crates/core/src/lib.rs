//! Normal forms, term extraction and finite verification for nonstandard
//! arithmetic in all finite types.

pub mod cli;
pub mod corpus;
pub mod eval;
pub mod extract;
pub mod rewrite;
pub mod syntax;
pub mod verify;
