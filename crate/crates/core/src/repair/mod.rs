//! Preference orders and the search for preferred rule repairs.
//!
//! Every ⪯-repair is a ⊆-repair and every consistent set is dominated by a
//! ⊆-repair, so the ⪯-maxima of the ⊆-repairs are exactly the ⪯-repairs. That
//! is the reference method. The per-kind searches below must return the same
//! sets; they avoid enumerating all ⊆-repairs. The weighted search relies on
//! every weight being at least 1.

mod order;
mod search;

pub use order::{compare, Comparison, PreferenceOrder};
pub use search::{
    preferred_repairs, subset_repairs, Repair, RepairSet, SearchConfig, SearchError, SearchStrategy, Searcher,
};
