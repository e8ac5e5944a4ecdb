use super::region::Region;
use crate::vision::CalibrationInfo;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Value type carried by a port.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortType {
    RawImage,
    MonoImage,
    DisparityImage,
    PointCloud,
}

impl PortType {
    pub fn as_str(self) -> &'static str {
        match self {
            PortType::RawImage => "RawImage",
            PortType::MonoImage => "MonoImage",
            PortType::DisparityImage => "DisparityImage",
            PortType::PointCloud => "PointCloud",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CameraSide {
    Left,
    Right,
}

/// What a component does when the pipeline executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentKind {
    /// Source: emits one of the frame's RAW inputs.
    Camera(CameraSide),
    Debayer,
    Rectify,
    Disparity,
    Reproject,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Port {
    pub name: String,
    pub ty: PortType,
}

impl Port {
    pub fn new(name: impl Into<String>, ty: PortType) -> Self {
        Port {
            name: name.into(),
            ty,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    pub kind: ComponentKind,
    pub inputs: Vec<Port>,
    pub outputs: Vec<Port>,
}

impl Component {
    /// Build a component with the standard port signature for its kind.
    pub fn standard(name: impl Into<String>, kind: ComponentKind) -> Self {
        let (inputs, outputs) = match kind {
            ComponentKind::Camera(_) => (vec![], vec![Port::new("output", PortType::RawImage)]),
            ComponentKind::Debayer => (
                vec![Port::new("input", PortType::RawImage)],
                vec![Port::new("output", PortType::MonoImage)],
            ),
            ComponentKind::Rectify => (
                vec![Port::new("input", PortType::MonoImage)],
                vec![Port::new("output", PortType::MonoImage)],
            ),
            ComponentKind::Disparity => (
                vec![
                    Port::new("left", PortType::MonoImage),
                    Port::new("right", PortType::MonoImage),
                ],
                vec![Port::new("output", PortType::DisparityImage)],
            ),
            ComponentKind::Reproject => (
                vec![
                    Port::new("disparity", PortType::DisparityImage),
                    Port::new("image", PortType::MonoImage),
                ],
                vec![Port::new("output", PortType::PointCloud)],
            ),
        };
        Component {
            name: name.into(),
            kind,
            inputs,
            outputs,
        }
    }

    /// Fully explicit constructor; mainly for tests that need unusual shapes.
    pub fn with_ports(
        name: impl Into<String>,
        kind: ComponentKind,
        inputs: Vec<Port>,
        outputs: Vec<Port>,
    ) -> Self {
        Component {
            name: name.into(),
            kind,
            inputs,
            outputs,
        }
    }

    pub fn input(&self, port: &str) -> Option<&Port> {
        self.inputs.iter().find(|p| p.name == port)
    }

    pub fn output(&self, port: &str) -> Option<&Port> {
        self.outputs.iter().find(|p| p.name == port)
    }
}

/// One end of a connector: a component's named port.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endpoint {
    pub component: String,
    pub port: String,
}

impl Endpoint {
    pub fn new(component: impl Into<String>, port: impl Into<String>) -> Self {
        Endpoint {
            component: component.into(),
            port: port.into(),
        }
    }
}

impl std::fmt::Display for Endpoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}.{}", self.component, self.port)
    }
}

/// Directed producer-to-consumer edge between two ports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connector {
    pub from: Endpoint,
    pub to: Endpoint,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("duplicate component '{0}'")]
    DuplicateComponent(String),
    #[error("connector references unknown component '{0}'")]
    UnknownComponent(String),
    #[error("connector references unknown port '{0}'")]
    UnknownPort(Endpoint),
    #[error("connector {from} -> {to} joins {from_ty} to {to_ty}")]
    ConnectorTypeMismatch {
        from: Endpoint,
        to: Endpoint,
        from_ty: &'static str,
        to_ty: &'static str,
    },
    #[error("input port '{0}' has {1} incoming connectors, expected exactly one")]
    InputArity(Endpoint, usize),
    #[error("source component '{0}' is not a camera")]
    SourceNotCamera(String),
    #[error("pipeline graph has a cycle through '{0}'")]
    CycleDetected(String),
    #[error("duplicate region '{0}'")]
    DuplicateRegion(String),
}

/// Stereo matcher parameters used when the pipeline executes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StereoParams {
    pub block_size: u32,
    pub max_disparity: u16,
}

impl Default for StereoParams {
    fn default() -> Self {
        StereoParams {
            block_size: 5,
            max_disparity: 64,
        }
    }
}

/// The pipeline as a validated typed DAG plus named regions and the
/// calibration and matcher parameters execution needs.
///
/// Immutable once built (regions are added during configuration); share
/// by reference across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineGraph {
    components: Vec<Component>,
    connectors: Vec<Connector>,
    regions: Vec<Region>,
    calibration: CalibrationInfo,
    stereo: StereoParams,
    topo: Vec<usize>,
}

impl PipelineGraph {
    pub fn new(
        components: Vec<Component>,
        connectors: Vec<Connector>,
        calibration: CalibrationInfo,
        stereo: StereoParams,
    ) -> Result<Self, GraphError> {
        let topo = validate(&components, &connectors)?;
        Ok(PipelineGraph {
            components,
            connectors,
            regions: Vec::new(),
            calibration,
            stereo,
            topo,
        })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn connectors(&self) -> &[Connector] {
        &self.connectors
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn calibration(&self) -> &CalibrationInfo {
        &self.calibration
    }

    pub fn stereo(&self) -> &StereoParams {
        &self.stereo
    }

    pub fn component(&self, name: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.name == name)
    }

    pub fn region(&self, name: &str) -> Option<&Region> {
        self.regions.iter().find(|r| r.name() == name)
    }

    /// Register a named region; names are unique.
    pub fn add_region(&mut self, region: Region) -> Result<(), GraphError> {
        if self.regions.iter().any(|r| r.name() == region.name()) {
            return Err(GraphError::DuplicateRegion(region.name().to_string()));
        }
        self.regions.push(region);
        Ok(())
    }

    /// Components in execution order: every producer before its consumers,
    /// ties broken by declaration order.
    pub fn topological_order(&self) -> impl Iterator<Item = &Component> {
        self.topo.iter().map(|&i| &self.components[i])
    }

    /// The producer endpoint feeding the given input port.
    pub fn incoming(&self, component: &str, port: &str) -> Option<&Endpoint> {
        self.connectors
            .iter()
            .find(|c| c.to.component == component && c.to.port == port)
            .map(|c| &c.from)
    }
}

fn validate(components: &[Component], connectors: &[Connector]) -> Result<Vec<usize>, GraphError> {
    for (i, c) in components.iter().enumerate() {
        if components[..i].iter().any(|other| other.name == c.name) {
            return Err(GraphError::DuplicateComponent(c.name.clone()));
        }
    }

    let index_of = |name: &str| components.iter().position(|c| c.name == name);

    for conn in connectors {
        let from_idx = index_of(&conn.from.component)
            .ok_or_else(|| GraphError::UnknownComponent(conn.from.component.clone()))?;
        let to_idx = index_of(&conn.to.component)
            .ok_or_else(|| GraphError::UnknownComponent(conn.to.component.clone()))?;
        let from_port = components[from_idx]
            .output(&conn.from.port)
            .ok_or_else(|| GraphError::UnknownPort(conn.from.clone()))?;
        let to_port = components[to_idx]
            .input(&conn.to.port)
            .ok_or_else(|| GraphError::UnknownPort(conn.to.clone()))?;
        if from_port.ty != to_port.ty {
            return Err(GraphError::ConnectorTypeMismatch {
                from: conn.from.clone(),
                to: conn.to.clone(),
                from_ty: from_port.ty.as_str(),
                to_ty: to_port.ty.as_str(),
            });
        }
    }

    for (ci, c) in components.iter().enumerate() {
        if c.inputs.is_empty() {
            if !matches!(c.kind, ComponentKind::Camera(_)) {
                return Err(GraphError::SourceNotCamera(c.name.clone()));
            }
        } else {
            for port in &c.inputs {
                let incoming = connectors
                    .iter()
                    .filter(|conn| conn.to.component == c.name && conn.to.port == port.name)
                    .count();
                if incoming != 1 {
                    return Err(GraphError::InputArity(
                        Endpoint::new(c.name.clone(), port.name.clone()),
                        incoming,
                    ));
                }
            }
        }
        let _ = ci;
    }

    // Kahn's algorithm; ready components are taken in declaration order so
    // the result is deterministic.
    let n = components.len();
    let mut indegree = vec![0usize; n];
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(connectors.len());
    for conn in connectors {
        let from = index_of(&conn.from.component).expect("checked above");
        let to = index_of(&conn.to.component).expect("checked above");
        edges.push((from, to));
        indegree[to] += 1;
    }
    let mut order = Vec::with_capacity(n);
    let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    while let Some(&next) = ready.first() {
        ready.remove(0);
        order.push(next);
        for &(from, to) in &edges {
            if from == next {
                indegree[to] -= 1;
                if indegree[to] == 0 {
                    // Insert keeping declaration order among ready nodes.
                    let pos = ready.partition_point(|&r| r < to);
                    ready.insert(pos, to);
                }
            }
        }
    }
    if order.len() != n {
        let stuck = (0..n)
            .find(|&i| !order.contains(&i))
            .map(|i| components[i].name.clone())
            .unwrap_or_default();
        return Err(GraphError::CycleDetected(stuck));
    }
    Ok(order)
}

/// Build the fixed stereo pipeline shape with default matcher parameters.
pub fn build_stereo_pipeline(calibration: CalibrationInfo) -> PipelineGraph {
    build_stereo_pipeline_with(calibration, StereoParams::default())
}

/// Build the fixed stereo pipeline shape: two cameras, per-side debayer and
/// rectification, one block matcher, one reprojection stage. The rectified
/// left image also feeds the reprojection stage as its reference image.
pub fn build_stereo_pipeline_with(
    calibration: CalibrationInfo,
    stereo: StereoParams,
) -> PipelineGraph {
    let components = vec![
        Component::standard("Camera_Left", ComponentKind::Camera(CameraSide::Left)),
        Component::standard("Camera_Right", ComponentKind::Camera(CameraSide::Right)),
        Component::standard("Bayer2Mono_Left", ComponentKind::Debayer),
        Component::standard("Bayer2Mono_Right", ComponentKind::Debayer),
        Component::standard("Rectify_Left", ComponentKind::Rectify),
        Component::standard("Rectify_Right", ComponentKind::Rectify),
        Component::standard("DisparityMap", ComponentKind::Disparity),
        Component::standard("PointCloud_3D", ComponentKind::Reproject),
    ];
    let edge = |from: (&str, &str), to: (&str, &str)| Connector {
        from: Endpoint::new(from.0, from.1),
        to: Endpoint::new(to.0, to.1),
    };
    let connectors = vec![
        edge(("Camera_Left", "output"), ("Bayer2Mono_Left", "input")),
        edge(("Camera_Right", "output"), ("Bayer2Mono_Right", "input")),
        edge(("Bayer2Mono_Left", "output"), ("Rectify_Left", "input")),
        edge(("Bayer2Mono_Right", "output"), ("Rectify_Right", "input")),
        edge(("Rectify_Left", "output"), ("DisparityMap", "left")),
        edge(("Rectify_Right", "output"), ("DisparityMap", "right")),
        edge(("DisparityMap", "output"), ("PointCloud_3D", "disparity")),
        edge(("Rectify_Left", "output"), ("PointCloud_3D", "image")),
    ];
    PipelineGraph::new(components, connectors, calibration, stereo)
        .expect("the fixed stereo shape always validates")
}
