//! Pipeline configuration file loading.
//!
//! The file is TOML with four parts: `[calibration]` (required), optional
//! `[stereo]` matcher parameters, optional explicit `[[component]]` /
//! `[[connector]]` tables (omitted, the built-in stereo shape is used),
//! optional `[[region]]` boxes, and an optional `[mapping]` table tying
//! rule ids to safety functions for coverage reports.

use super::graph::{
    build_stereo_pipeline_with, CameraSide, Component, ComponentKind, Connector, Endpoint,
    GraphError, PipelineGraph, StereoParams,
};
use super::region::{Region, RegionError};
use crate::vision::CalibrationInfo;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("calibration: {0}")]
    Calibration(#[from] crate::vision::CalibrationError),
    #[error("component '{name}': {message}")]
    BadComponent { name: String, message: String },
    #[error("connector endpoint '{0}' must look like Component.port")]
    BadEndpoint(String),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    calibration: CalibrationInfo,
    #[serde(default)]
    stereo: Option<StereoParams>,
    #[serde(default)]
    component: Vec<ComponentEntry>,
    #[serde(default)]
    connector: Vec<ConnectorEntry>,
    #[serde(default)]
    region: Vec<RegionEntry>,
    #[serde(default)]
    mapping: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentEntry {
    name: String,
    kind: String,
    #[serde(default)]
    side: Option<CameraSide>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConnectorEntry {
    from: String,
    to: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionEntry {
    name: String,
    min: [f64; 3],
    max: [f64; 3],
}

/// A loaded configuration: the validated graph plus the report mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSetup {
    pub graph: PipelineGraph,
    pub mapping: BTreeMap<String, Vec<String>>,
}

pub fn load_pipeline_config(path: &Path) -> Result<PipelineSetup, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_pipeline_config(&text)
}

pub fn parse_pipeline_config(text: &str) -> Result<PipelineSetup, ConfigError> {
    let file: ConfigFile = toml::from_str(text)?;
    file.calibration.validate()?;
    let stereo = file.stereo.unwrap_or_default();

    let mut graph = if file.component.is_empty() {
        build_stereo_pipeline_with(file.calibration, stereo)
    } else {
        let components = file
            .component
            .iter()
            .map(component_from_entry)
            .collect::<Result<Vec<_>, _>>()?;
        let connectors = file
            .connector
            .iter()
            .map(|c| {
                Ok(Connector {
                    from: parse_endpoint(&c.from)?,
                    to: parse_endpoint(&c.to)?,
                })
            })
            .collect::<Result<Vec<_>, ConfigError>>()?;
        PipelineGraph::new(components, connectors, file.calibration, stereo)?
    };

    for entry in &file.region {
        graph.add_region(Region::new(entry.name.clone(), entry.min, entry.max)?)?;
    }

    Ok(PipelineSetup {
        graph,
        mapping: file.mapping,
    })
}

fn component_from_entry(entry: &ComponentEntry) -> Result<Component, ConfigError> {
    let kind = match entry.kind.as_str() {
        "camera" => {
            let side = entry.side.ok_or_else(|| ConfigError::BadComponent {
                name: entry.name.clone(),
                message: "camera needs side = \"left\" or \"right\"".into(),
            })?;
            ComponentKind::Camera(side)
        }
        "debayer" => ComponentKind::Debayer,
        "rectify" => ComponentKind::Rectify,
        "disparity" => ComponentKind::Disparity,
        "reproject" => ComponentKind::Reproject,
        other => {
            return Err(ConfigError::BadComponent {
                name: entry.name.clone(),
                message: format!("unknown kind '{other}'"),
            })
        }
    };
    Ok(Component::standard(entry.name.clone(), kind))
}

fn parse_endpoint(text: &str) -> Result<Endpoint, ConfigError> {
    let (component, port) = text
        .split_once('.')
        .ok_or_else(|| ConfigError::BadEndpoint(text.to_string()))?;
    if component.is_empty() || port.is_empty() {
        return Err(ConfigError::BadEndpoint(text.to_string()));
    }
    Ok(Endpoint::new(component, port))
}
