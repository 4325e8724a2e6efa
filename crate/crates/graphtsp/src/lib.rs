//! Tours and s-t walks in unweighted graphs with certified edge-count bounds.
//!
//! The pipeline lower-bounds the optimum by an exact rational cut relaxation,
//! builds tours from a spanning structure plus matching-selected corrections,
//! and ships generators plus a brute-force reference solver for validation.

pub mod circulation;
pub mod cli;
pub mod graph;
pub mod harness;
pub mod lp;
pub mod matching;
pub mod pairing;
pub mod pipeline;
