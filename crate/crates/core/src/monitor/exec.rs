use crate::pipeline::{
    CameraSide, Component, ComponentKind, FrameStore, PipelineGraph, PortType, StoreError, Value,
};
use crate::vision::{debayer_to_mono, disparity, rectify, reproject, KernelError, RawImage};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExecError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("component '{component}': {message}")]
    BadComponent { component: String, message: String },
}

/// Execute every component in topological order against one stereo frame,
/// returning the sealed store. Fully deterministic: the same graph and
/// inputs produce a bit-identical store.
pub fn run_frame(
    graph: &PipelineGraph,
    left: RawImage,
    right: RawImage,
    frame_id: u64,
) -> Result<FrameStore, ExecError> {
    if left.width() != right.width() || left.height() != right.height() {
        return Err(KernelError::DimensionMismatch {
            left_width: left.width(),
            left_height: left.height(),
            right_width: right.width(),
            right_height: right.height(),
        }
        .into());
    }
    if left.bit_depth() != right.bit_depth() {
        return Err(KernelError::BitDepthMismatch {
            left: left.bit_depth(),
            right: right.bit_depth(),
        }
        .into());
    }

    let left = Arc::new(left);
    let right = Arc::new(right);
    let mut store = FrameStore::new(frame_id);

    for component in graph.topological_order() {
        let value = execute_component(graph, component, &left, &right, &store)?;
        let out_port = single_output(component)?;
        store.insert(component.name.clone(), out_port, value)?;
    }

    store.seal();
    Ok(store)
}

fn single_output(component: &Component) -> Result<String, ExecError> {
    match component.outputs.as_slice() {
        [port] => Ok(port.name.clone()),
        other => Err(ExecError::BadComponent {
            component: component.name.clone(),
            message: format!("expected one output port, found {}", other.len()),
        }),
    }
}

/// Fetch the value feeding the given input port, following its connector.
fn input_value(
    graph: &PipelineGraph,
    store: &FrameStore,
    component: &Component,
    port: &str,
) -> Result<Value, ExecError> {
    let from = graph
        .incoming(&component.name, port)
        .ok_or_else(|| ExecError::BadComponent {
            component: component.name.clone(),
            message: format!("input port '{port}' has no producer"),
        })?;
    Ok(store.tap(&from.component, &from.port)?.clone())
}

fn execute_component(
    graph: &PipelineGraph,
    component: &Component,
    left: &Arc<RawImage>,
    right: &Arc<RawImage>,
    store: &FrameStore,
) -> Result<Value, ExecError> {
    let shape_err = |message: String| ExecError::BadComponent {
        component: component.name.clone(),
        message,
    };

    match component.kind {
        ComponentKind::Camera(side) => Ok(Value::Raw(match side {
            CameraSide::Left => Arc::clone(left),
            CameraSide::Right => Arc::clone(right),
        })),
        ComponentKind::Debayer => {
            let port = component
                .inputs
                .first()
                .ok_or_else(|| shape_err("debayer needs one input".into()))?;
            let Value::Raw(raw) = input_value(graph, store, component, &port.name)? else {
                return Err(shape_err("debayer input must be a RAW image".into()));
            };
            Ok(Value::Mono(Arc::new(debayer_to_mono(&raw))))
        }
        ComponentKind::Rectify => {
            let port = component
                .inputs
                .first()
                .ok_or_else(|| shape_err("rectify needs one input".into()))?;
            let Value::Mono(img) = input_value(graph, store, component, &port.name)? else {
                return Err(shape_err("rectify input must be a mono image".into()));
            };
            Ok(Value::Mono(Arc::new(rectify(&img, graph.calibration()))))
        }
        ComponentKind::Disparity => {
            let [left_port, right_port] = component.inputs.as_slice() else {
                return Err(shape_err("disparity needs left and right inputs".into()));
            };
            let Value::Mono(l) = input_value(graph, store, component, &left_port.name)? else {
                return Err(shape_err("disparity inputs must be mono images".into()));
            };
            let Value::Mono(r) = input_value(graph, store, component, &right_port.name)? else {
                return Err(shape_err("disparity inputs must be mono images".into()));
            };
            let params = graph.stereo();
            let disp = disparity(&l, &r, params.block_size, params.max_disparity)?;
            Ok(Value::Disparity(Arc::new(disp)))
        }
        ComponentKind::Reproject => {
            let disp_port = component
                .inputs
                .iter()
                .find(|p| p.ty == PortType::DisparityImage)
                .ok_or_else(|| shape_err("reproject needs a disparity input".into()))?;
            let Value::Disparity(disp) = input_value(graph, store, component, &disp_port.name)?
            else {
                return Err(shape_err("disparity input carried the wrong value".into()));
            };
            // The optional reference image only cross-checks dimensions.
            if let Some(img_port) = component
                .inputs
                .iter()
                .find(|p| p.ty == PortType::MonoImage)
            {
                if let Value::Mono(img) = input_value(graph, store, component, &img_port.name)? {
                    if img.width() != disp.width() || img.height() != disp.height() {
                        return Err(KernelError::DimensionMismatch {
                            left_width: img.width(),
                            left_height: img.height(),
                            right_width: disp.width(),
                            right_height: disp.height(),
                        }
                        .into());
                    }
                }
            }
            Ok(Value::Cloud(Arc::new(reproject(
                &disp,
                graph.calibration(),
            ))))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::build_stereo_pipeline;
    use crate::vision::{BayerPattern, CalibrationInfo};

    fn calib() -> CalibrationInfo {
        CalibrationInfo {
            focal_length: 100.0,
            principal_point: (15.5, 15.5),
            baseline: 0.1,
            radial_k1: 0.0,
        }
    }

    fn textured_raw(seed: u64) -> RawImage {
        let mut state = seed;
        let samples: Vec<u16> = (0..32 * 32)
            .map(|_| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                ((state >> 33) & 0xff) as u16
            })
            .collect();
        RawImage::new(32, 32, 8, BayerPattern::Rggb, samples).unwrap()
    }

    #[test]
    fn all_eight_ports_are_populated() {
        let graph = build_stereo_pipeline(calib());
        let store = run_frame(&graph, textured_raw(1), textured_raw(2), 0).unwrap();
        assert_eq!(store.len(), 8);
        assert!(store.is_sealed());
        for component in graph.components() {
            assert!(
                store.tap(&component.name, "output").is_ok(),
                "{}",
                component.name
            );
        }
    }

    #[test]
    fn rerun_is_bit_identical() {
        let graph = build_stereo_pipeline(calib());
        let a = run_frame(&graph, textured_raw(1), textured_raw(2), 5).unwrap();
        let b = run_frame(&graph, textured_raw(1), textured_raw(2), 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mismatched_sizes_fail_without_a_store() {
        let graph = build_stereo_pipeline(calib());
        let small = RawImage::new(16, 16, 8, BayerPattern::Rggb, vec![0; 256]).unwrap();
        let err = run_frame(&graph, textured_raw(1), small, 0).unwrap_err();
        assert!(matches!(
            err,
            ExecError::Kernel(KernelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mismatched_bit_depths_are_rejected() {
        let graph = build_stereo_pipeline(calib());
        let deep = RawImage::new(32, 32, 12, BayerPattern::Rggb, vec![0; 1024]).unwrap();
        let err = run_frame(&graph, textured_raw(1), deep, 0).unwrap_err();
        assert!(matches!(
            err,
            ExecError::Kernel(KernelError::BitDepthMismatch { .. })
        ));
    }
}
