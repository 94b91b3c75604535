pub mod error;
pub mod exec;
pub mod limits;
pub mod partitions;
pub mod perm;
pub mod rational;
pub mod leveltrees;
pub mod charts;
pub mod degeneration;
pub mod sampling;
pub mod strata;
pub mod groebner;
pub mod chow;
pub mod json;
