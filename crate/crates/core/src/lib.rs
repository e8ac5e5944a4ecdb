//! Declarative safety-rule monitor for stereo camera perception pipelines.
//!
//! The crate is organized around a fixed dataflow: two RAW camera images are
//! debayered, rectified, block-matched into a disparity map and reprojected
//! into a 3D point cloud. Safety rules written in a small expression DSL are
//! compiled against that pipeline and evaluated once per frame; any failing
//! rule latches a protective stop.
//!
//! Modules:
//! - [`vision`]: image types and the processing kernels themselves.
//! - [`pipeline`]: the typed component/port/connector graph, named 3D
//!   regions, per-frame value store, and configuration loading.
//! - [`dsl`]: lexer, parser and resolver for the rule language.
//! - [`monitor`]: frame execution, rule evaluation, the protective-stop
//!   latch and the audit log.
//! - [`faults`]: synthetic stereo scene rendering and lens-fault injection.
//! - [`report`]: safety-function coverage reporting.

// Graph/config errors carry both connector endpoints for diagnostics and
// only ever surface during startup.
#![allow(clippy::result_large_err)]

pub mod dsl;
pub mod faults;
pub mod monitor;
pub mod pipeline;
pub mod report;
pub mod vision;
