//! Antipower structure of prefixes of the Thue-Morse word.
//!
//! The word is never materialized for search: letters come from the parity of
//! the binary digit sum, and length-`n` blocks are read 64 letters at a time.
//! On top of that sit the k-antipower prefix test, the threshold function
//! [`kappa()`](kappa::kappa), the extremal functions
//! [`gamma`](extremal::gamma) / [`big_gamma`](extremal::big_gamma), a set of
//! finite-range lemma verifiers, and ratio sweeps.
//!
//! Sweeps and verification grids run on rayon when the `parallel` feature is
//! enabled (the default). Output never depends on the thread count.

pub mod antipower;
pub mod asymptotics;
mod error;
pub mod extremal;
pub mod kappa;
pub mod lemmas;
mod par;
pub mod ratio;
pub mod thue_morse;

pub use antipower::{AntipowerVerdict, BlockRef, ShiftQuery};
pub use error::{Error, Result};
pub use extremal::ExtremalRecord;
pub use kappa::KappaRecord;
pub use lemmas::{LemmaId, LemmaReport};

pub use ratio::Ratio;
pub use thue_morse::{Bit, FiniteWord};
