//! Classification and analysis of frequency hypercubes `F^n(4;2,2)`, viewed
//! as double-MDS-codes in the Hamming graph `H(n,4)`.
//!
//! * [`hypercube`]: points, lines, code sets and their line-intersection kinds.
//! * [`symmetry`]: the equivalence group, canonical forms and group data.
//! * [`classifier`]: classification by layers with double-count validation.
//! * [`gf2`]: the line-incidence matrix and the unitrade space.
//! * [`split`]: splittability and odd cycles.
//! * [`testing_sets`]: testing sets, reconstruction and the upper bound.
//! * [`catalog`]: catalog files and tables.
//!
//! ```
//! use freqcube::hypercube::{classify_set, CodeSet};
//!
//! let s = CodeSet::from_indices(1, [0, 1]).unwrap();
//! assert!(classify_set(&s).is_double_mds);
//! ```

pub mod catalog;
pub mod classifier;
pub mod error;
pub mod gf2;
pub mod hypercube;
pub mod split;
pub mod symmetry;
pub mod testing_sets;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/hamming-graph.md")]
    mod hamming_graph {}
    #[doc = include_str!("../../../book/src/equivalence.md")]
    mod equivalence {}
    #[doc = include_str!("../../../book/src/classification.md")]
    mod classification {}
    #[doc = include_str!("../../../book/src/unitrades.md")]
    mod unitrades {}
    #[doc = include_str!("../../../book/src/splittability.md")]
    mod splittability {}
    #[doc = include_str!("../../../book/src/testing-sets.md")]
    mod testing_sets {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
