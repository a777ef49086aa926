//! Shared I/O plumbing for the cusplab binary: result tables, run manifests,
//! flat config files, and SVG charts. Exposed as a library so integration
//! tests can exercise the file formats directly.

pub mod config;
pub mod manifest;
pub mod svg;
pub mod table;
