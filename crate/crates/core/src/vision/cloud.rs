use super::calib::CalibrationInfo;
use super::disparity::DisparityImage;
use crate::pipeline::Region;

/// A 3D point in the left-camera frame (x right, y down, z forward), meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }
}

/// Points reconstructed from a disparity image, left-camera frame.
///
/// Every point has z > 0; pixels without positive disparity emit nothing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    points: Vec<Point3>,
}

impl PointCloud {
    pub fn new(points: Vec<Point3>) -> Self {
        debug_assert!(points.iter().all(|p| p.z > 0.0));
        PointCloud { points }
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Reproject a disparity image through the pinhole model.
///
/// For each valid pixel (u, v) with disparity d > 0:
/// z = f*B/d, x = (u - cx)*z/f, y = (v - cy)*z/f. Pixels with d = 0 and
/// invalid pixels emit no point. Points come out in row-major pixel order.
pub fn reproject(disp: &DisparityImage, calib: &CalibrationInfo) -> PointCloud {
    let f = calib.focal_length;
    let (cx, cy) = calib.principal_point;
    let fb = f * calib.baseline;
    let mut points = Vec::new();

    for v in 0..disp.height() {
        for u in 0..disp.width() {
            let Some(d) = disp.get(u, v) else { continue };
            if d == 0 {
                continue;
            }
            let z = fb / f64::from(d);
            let x = (f64::from(u) - cx) * z / f;
            let y = (f64::from(v) - cy) * z / f;
            points.push(Point3 { x, y, z });
        }
    }

    PointCloud { points }
}

/// Keep exactly the points inside the region's box, bounds inclusive,
/// preserving order.
pub fn in_area(cloud: &PointCloud, region: &Region) -> PointCloud {
    let points = cloud
        .points
        .iter()
        .copied()
        .filter(|p| region.contains(p.x, p.y, p.z))
        .collect();
    PointCloud { points }
}
