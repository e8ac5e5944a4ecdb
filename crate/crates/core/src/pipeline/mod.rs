//! The typed dataflow graph of the stereo pipeline, named 3D regions, and
//! the per-frame value store the rule engine reads from.

mod config;
mod graph;
mod region;
mod store;

pub use config::{load_pipeline_config, parse_pipeline_config, ConfigError, PipelineSetup};
pub use graph::{
    build_stereo_pipeline, build_stereo_pipeline_with, CameraSide, Component, ComponentKind,
    Connector, Endpoint, GraphError, PipelineGraph, Port, PortType, StereoParams,
};
pub use region::{Region, RegionError};
pub use store::{FrameStore, StoreError, Value};
