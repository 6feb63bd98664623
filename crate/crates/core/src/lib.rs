//! Block codes in which no prefix of one codeword equals a suffix of
//! another (or the same) codeword for any overlap length in a window
//! `[t1, t2]`.
//!
//! Modules:
//!
//! - [`word`]: alphabets, words, codes and the overlap verifier.
//! - [`family`]: partition families, their enumeration and decomposition.
//! - [`constructions`]: codes built from a family.
//! - [`bounds`]: lower and upper bounds and known exact values.
//! - [`search`]: exact maximum codes and maximality checks at small sizes.
//! - [`sync`]: insertion/deletion detection latency of a code stream.
//! - [`tables`]: best construction sizes grown from maximum seed codes.
//! - [`io`]: text formats for codes and families.

pub mod arith;
pub mod bignum;
pub mod bounds;
pub mod compositions;
pub mod constructions;
pub mod exec;
pub mod family;
pub mod io;
pub mod search;
pub mod sync;
pub mod tables;
pub mod word;

pub use bounds::{bound_report, lower_bounds, upper_bounds, BoundReport, Params};
pub use constructions::{Construction, ConstructionKind, ConstructionSpec};
pub use exec::Execution;
pub use family::{FamilyEnumerator, PartitionFamily};
pub use search::{max_code, SearchOptions, SearchOutcome};
pub use word::{verify_overlap_free, Alphabet, CodeSet, OverlapWindow, Verdict, Word};
