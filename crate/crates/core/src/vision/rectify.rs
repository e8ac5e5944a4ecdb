use super::calib::CalibrationInfo;
use super::image::MonoImage;

/// Undistort an image with the one-coefficient radial model.
///
/// For every output pixel the source location is found by scaling the
/// offset from the principal point by `1 + k1 * r^2`, where `r` is the
/// offset normalized by the focal length, then bilinearly sampling the
/// input. Samples falling outside the input become intensity 0. With
/// `radial_k1 = 0` the output is a bit-identical copy.
pub fn rectify(img: &MonoImage, calib: &CalibrationInfo) -> MonoImage {
    if calib.radial_k1 == 0.0 {
        return img.clone();
    }

    let (cx, cy) = calib.principal_point;
    let f = calib.focal_length;
    let k1 = calib.radial_k1;
    let width = img.width();
    let height = img.height();
    let max_level = img.max_level();
    let mut out = vec![0u16; width as usize * height as usize];

    for v in 0..height {
        for u in 0..width {
            let dx = f64::from(u) - cx;
            let dy = f64::from(v) - cy;
            let xn = dx / f;
            let yn = dy / f;
            let scale = 1.0 + k1 * (xn * xn + yn * yn);
            let sx = cx + dx * scale;
            let sy = cy + dy * scale;
            out[(v * width + u) as usize] = sample_bilinear(img, sx, sy, max_level);
        }
    }

    MonoImage::new(width, height, img.bit_depth(), out)
        .expect("samples are clamped to the bit depth")
}

fn sample_bilinear(img: &MonoImage, x: f64, y: f64, max_level: u16) -> u16 {
    if x < 0.0 || y < 0.0 {
        return 0;
    }
    let x0 = x.floor();
    let y0 = y.floor();
    let w = i64::from(img.width());
    let h = i64::from(img.height());
    let ix = x0 as i64;
    let iy = y0 as i64;
    if ix >= w || iy >= h {
        return 0;
    }
    let fx = x - x0;
    let fy = y - y0;

    let pixel = |px: i64, py: i64| -> f64 {
        if px < 0 || py < 0 || px >= w || py >= h {
            0.0
        } else {
            f64::from(img.get(px as u32, py as u32))
        }
    };

    let p00 = pixel(ix, iy);
    let p10 = pixel(ix + 1, iy);
    let p01 = pixel(ix, iy + 1);
    let p11 = pixel(ix + 1, iy + 1);

    let top = p00 * (1.0 - fx) + p10 * fx;
    let bottom = p01 * (1.0 - fx) + p11 * fx;
    let value = top * (1.0 - fy) + bottom * fy;
    (value.round() as u32).min(u32::from(max_level)) as u16
}

#[cfg(test)]
mod tests {
    use super::*;

    fn calib(k1: f64) -> CalibrationInfo {
        CalibrationInfo {
            focal_length: 300.0,
            principal_point: (15.5, 15.5),
            baseline: 0.12,
            radial_k1: k1,
        }
    }

    fn noisy_image(width: u32, height: u32) -> MonoImage {
        let mut state = 0xdeadbeefcafef00du64;
        let samples: Vec<u16> = (0..width * height)
            .map(|_| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                ((state >> 33) & 0xff) as u16
            })
            .collect();
        MonoImage::new(width, height, 8, samples).unwrap()
    }

    #[test]
    fn zero_coefficient_is_identity() {
        let img = noisy_image(32, 32);
        assert_eq!(rectify(&img, &calib(0.0)), img);
    }

    #[test]
    fn principal_point_is_fixed() {
        // Single bright pixel at the principal point survives any k1.
        let mut samples = vec![0u16; 32 * 32];
        // principal point (15.5, 15.5) is shared by the four center pixels;
        // use a calibration centered exactly on pixel (16, 16) instead.
        samples[16 * 32 + 16] = 200;
        let img = MonoImage::new(32, 32, 8, samples).unwrap();
        for k1 in [0.05, 0.2, -0.1, 1.0] {
            let c = CalibrationInfo {
                focal_length: 100.0,
                principal_point: (16.0, 16.0),
                baseline: 0.12,
                radial_k1: k1,
            };
            let out = rectify(&img, &c);
            assert_eq!(out.get(16, 16), 200, "k1={k1}");
        }
    }

    // Independent oracle: evaluate the same radial mapping per pixel with a
    // separately written nearest-of-four bilinear interpolation.
    fn oracle_rectify(img: &MonoImage, c: &CalibrationInfo) -> Vec<u16> {
        let (cx, cy) = c.principal_point;
        let mut out = Vec::with_capacity((img.width() * img.height()) as usize);
        for v in 0..img.height() {
            for u in 0..img.width() {
                let xn = (f64::from(u) - cx) / c.focal_length;
                let yn = (f64::from(v) - cy) / c.focal_length;
                let r2 = xn * xn + yn * yn;
                let sx = cx + (f64::from(u) - cx) * (1.0 + c.radial_k1 * r2);
                let sy = cy + (f64::from(v) - cy) * (1.0 + c.radial_k1 * r2);
                let mut acc = 0.0f64;
                for (px, py, wx, wy) in [
                    (
                        sx.floor(),
                        sy.floor(),
                        1.0 - (sx - sx.floor()),
                        1.0 - (sy - sy.floor()),
                    ),
                    (
                        sx.floor() + 1.0,
                        sy.floor(),
                        sx - sx.floor(),
                        1.0 - (sy - sy.floor()),
                    ),
                    (
                        sx.floor(),
                        sy.floor() + 1.0,
                        1.0 - (sx - sx.floor()),
                        sy - sy.floor(),
                    ),
                    (
                        sx.floor() + 1.0,
                        sy.floor() + 1.0,
                        sx - sx.floor(),
                        sy - sy.floor(),
                    ),
                ] {
                    let inside = px >= 0.0
                        && py >= 0.0
                        && (px as i64) < i64::from(img.width())
                        && (py as i64) < i64::from(img.height());
                    // Out-of-source taps contribute 0 in both implementations,
                    // and wholly out-of-range targets return 0 below.
                    if inside && sx >= 0.0 && sy >= 0.0 {
                        acc += f64::from(img.get(px as u32, py as u32)) * wx * wy;
                    }
                }
                let clamped = if sx < 0.0
                    || sy < 0.0
                    || sx.floor() as i64 >= i64::from(img.width())
                    || sy.floor() as i64 >= i64::from(img.height())
                {
                    0
                } else {
                    acc.round() as u16
                };
                out.push(clamped.min(img.max_level()));
            }
        }
        out
    }

    #[test]
    fn grid_matches_radial_mapping_oracle() {
        // Synthetic grid: bright lines every 8 pixels.
        let width = 32u32;
        let height = 32u32;
        let samples: Vec<u16> = (0..height)
            .flat_map(|y| (0..width).map(move |x| if x % 8 == 0 || y % 8 == 0 { 220 } else { 30 }))
            .collect();
        let img = MonoImage::new(width, height, 8, samples).unwrap();
        let c = CalibrationInfo {
            focal_length: 30.0, // short focal length so k1=0.1 visibly moves corners
            principal_point: (15.5, 15.5),
            baseline: 0.12,
            radial_k1: 0.1,
        };
        let out = rectify(&img, &c);
        let expect = oracle_rectify(&img, &c);
        for (i, (&got, &want)) in out.samples().iter().zip(expect.iter()).enumerate() {
            let diff = i64::from(got) - i64::from(want);
            assert!(diff.abs() <= 1, "pixel {i}: got {got}, oracle {want}");
        }
        // The mapping must actually displace the corner region.
        assert_ne!(out, img);
    }
}
