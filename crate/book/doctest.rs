// mdbook cannot run listings that depend on a workspace crate, so each
// chapter is attached to an empty module here and `cargo test --doc` runs its
// code blocks against `multiphase`. One module per chapter keeps failures
// traceable to a file.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("src/loops.md")]
pub mod loops {}
#[doc = include_str!("src/certificates.md")]
pub mod certificates {}
#[doc = include_str!("src/multiphase.md")]
pub mod multiphase_functions {}
#[doc = include_str!("src/nested.md")]
pub mod nested {}
#[doc = include_str!("src/integers.md")]
pub mod integers {}
#[doc = include_str!("src/lexicographic.md")]
pub mod lexicographic {}
#[doc = include_str!("src/bounds.md")]
pub mod bounds {}
#[doc = include_str!("src/cli.md")]
pub mod cli {}
