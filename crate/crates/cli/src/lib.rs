//! Scan and table machinery behind the `lattice-tsp` binary, exposed as a
//! library so the sweep stays testable (determinism, resume, schema).

pub mod scan;
pub mod table;
