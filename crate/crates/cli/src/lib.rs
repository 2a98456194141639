//! IO companion to the core library: JSON encodings for its objects,
//! report bundles for its checks, and the named check suites behind the
//! `cylab` binary.

pub mod report;
pub mod schema;
pub mod suites;
