//! Rasters, viewports, and byte-level emitters (PPM P6, PNG, CSV).
//!
//! All emitters are pure functions to bytes so outputs can be compared
//! byte-for-byte in tests; file IO lives with the callers.

use crate::error::{Error, Result};
use crate::sphere::ExtendedComplex;
use num_complex::Complex64;

/// A complex-plane window: center plus half-extents. The pixel ↔ point
/// mapping is affine and invertible (pixel centers).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub center: Complex64,
    pub half_width: f64,
    pub half_height: f64,
}

impl Viewport {
    pub fn new(center: Complex64, half_width: f64, half_height: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_height > 0.0)
            || !half_width.is_finite()
            || !half_height.is_finite()
        {
            return Err(Error::InvalidRaster(format!(
                "viewport must have positive area, got half extents {half_width} × {half_height}"
            )));
        }
        Ok(Viewport {
            center,
            half_width,
            half_height,
        })
    }

    /// From corners (x0, y0), (x1, y1); rejects swapped corners.
    pub fn from_corners(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        if !(x1 > x0 && y1 > y0) {
            return Err(Error::InvalidRaster(format!(
                "swapped or empty viewport corners ({x0}, {y0}) .. ({x1}, {y1})"
            )));
        }
        Viewport::new(
            Complex64::new(0.5 * (x0 + x1), 0.5 * (y0 + y1)),
            0.5 * (x1 - x0),
            0.5 * (y1 - y0),
        )
    }

    /// Center of pixel (col, row) in a width × height raster.
    /// Row 0 is the top of the viewport.
    pub fn pixel_to_point(&self, width: usize, height: usize, col: usize, row: usize) -> Complex64 {
        let fx = (col as f64 + 0.5) / width as f64 * 2.0 - 1.0;
        let fy = 1.0 - (row as f64 + 0.5) / height as f64 * 2.0;
        Complex64::new(
            self.center.re + fx * self.half_width,
            self.center.im + fy * self.half_height,
        )
    }

    /// Pixel containing z, if inside the viewport.
    pub fn point_to_pixel(
        &self,
        width: usize,
        height: usize,
        z: Complex64,
    ) -> Option<(usize, usize)> {
        let fx = (z.re - self.center.re) / self.half_width;
        let fy = (z.im - self.center.im) / self.half_height;
        if fx.abs() >= 1.0 || fy.abs() >= 1.0 {
            return None;
        }
        let col = ((fx + 1.0) * 0.5 * width as f64) as usize;
        let row = ((1.0 - fy) * 0.5 * height as f64) as usize;
        Some((col.min(width - 1), row.min(height - 1)))
    }
}

/// A width × height grid of values over a viewport.
#[derive(Debug, Clone)]
pub struct Raster<T> {
    pub width: usize,
    pub height: usize,
    pub viewport: Viewport,
    pub data: Vec<T>,
}

impl<T: Copy + Default> Raster<T> {
    pub fn new(width: usize, height: usize, viewport: Viewport) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster(format!(
                "raster must be at least 1×1, got {width}×{height}"
            )));
        }
        Ok(Raster {
            width,
            height,
            viewport,
            data: vec![T::default(); width * height],
        })
    }

    pub fn get(&self, col: usize, row: usize) -> T {
        self.data[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize, value: T) {
        self.data[row * self.width + col] = value;
    }
}

/// Classification codes stored in class rasters.
pub const CODE_UNDECIDED: u32 = 0;
pub const CODE_LAMBDA_MINUS: u32 = 1;
pub const CODE_LAMBDA_PLUS: u32 = 2;
/// Omega(n) is stored as CODE_OMEGA_BASE + n.
pub const CODE_OMEGA_BASE: u32 = 3;
/// Reserved mask for pixels excluded up front (degenerate parameters).
pub const CODE_MASKED: u32 = u32::MAX;

fn omega_shade(n: u32) -> [u8; 3] {
    // smooth two-tone ramp over escape steps
    let t = (n as f64 / 24.0).tanh();
    let r = (40.0 + 120.0 * t) as u8;
    let g = (90.0 + 150.0 * t) as u8;
    let b = (60.0 + 60.0 * (1.0 - t)) as u8;
    [r, g, b]
}

pub fn class_color(code: u32) -> [u8; 3] {
    match code {
        CODE_MASKED => [255, 0, 255],
        CODE_UNDECIDED => [24, 24, 24],
        CODE_LAMBDA_MINUS => [40, 80, 200],
        CODE_LAMBDA_PLUS => [200, 70, 40],
        n => omega_shade(n - CODE_OMEGA_BASE),
    }
}

/// Classification base layer with the attractor hit counts blended in.
pub fn compose_render_rgb(
    class: &Raster<u32>,
    hits_minus: &Raster<u32>,
    hits_plus: &Raster<u32>,
) -> Vec<u8> {
    let mut out = Vec::with_capacity(class.data.len() * 3);
    for i in 0..class.data.len() {
        let mut px = class_color(class.data[i]);
        let boost = |px: &mut [u8; 3], count: u32, tint: [f64; 3]| {
            if count == 0 {
                return;
            }
            let s = (1.0 + count as f64).ln() / 6.0;
            let s = s.min(1.0);
            for k in 0..3 {
                let base = px[k] as f64;
                px[k] = (base + (255.0 - base) * s * tint[k]) as u8;
            }
        };
        boost(&mut px, hits_minus.data[i], [0.55, 0.75, 1.0]);
        boost(&mut px, hits_plus.data[i], [1.0, 0.8, 0.5]);
        out.extend_from_slice(&px);
    }
    out
}

/// Escape-step shading for parameter-plane scans.
pub fn scan_rgb(scan: &Raster<u32>, budget: u32) -> Vec<u8> {
    let mut out = Vec::with_capacity(scan.data.len() * 3);
    for &v in &scan.data {
        let px = if v == CODE_MASKED {
            [255, 0, 255]
        } else if v >= budget {
            [0, 0, 0] // bounded: the empirical locus
        } else {
            let t = v as f64 / budget as f64;
            let r = (255.0 * t.powf(0.45)) as u8;
            let g = (255.0 * (0.2 + 0.8 * t).min(1.0) * t.powf(0.30)) as u8;
            let b = (255.0 * (1.0 - t).powf(0.7)) as u8;
            [r, g, b]
        };
        out.extend_from_slice(&px);
    }
    out
}

/// Grayscale-to-hot ramp for scalar grids in [0, 1] (Beltrami moduli).
pub fn heatmap_rgb(values: &Raster<f64>) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.data.len() * 3);
    for &v in &values.data {
        let t = v.clamp(0.0, 1.0);
        let r = (255.0 * t.powf(0.6)) as u8;
        let g = (255.0 * t * t) as u8;
        let b = (90.0 * (1.0 - t)) as u8;
        out.extend_from_slice(&[r, g, b]);
    }
    out
}

/// PPM (P6) bytes.
pub fn ppm_bytes(width: usize, height: usize, rgb: &[u8]) -> Vec<u8> {
    assert_eq!(rgb.len(), width * height * 3);
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(rgb);
    out
}

/// PNG bytes (8-bit RGB, fixed encoder settings so output is reproducible).
pub fn png_bytes(width: usize, height: usize, rgb: &[u8]) -> Result<Vec<u8>> {
    assert_eq!(rgb.len(), width * height * 3);
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, width as u32, height as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        enc.set_compression(png::Compression::default());
        let mut writer = enc
            .write_header()
            .map_err(|e| Error::InvalidRaster(format!("png header: {e}")))?;
        writer
            .write_image_data(rgb)
            .map_err(|e| Error::InvalidRaster(format!("png data: {e}")))?;
    }
    Ok(out)
}

/// CSV bytes for a point cloud: a provenance comment, a header row, then
/// x,y per line. Points at infinity are skipped and counted in the comment.
pub fn cloud_csv_bytes(provenance: &str, points: &[ExtendedComplex]) -> Vec<u8> {
    let n_inf = points.iter().filter(|p| p.is_infinite()).count();
    let mut s = format!("# {provenance} points={} skipped_infinite={n_inf}\n", points.len());
    s.push_str("x,y\n");
    for p in points {
        if let Some(z) = p.to_complex() {
            use std::fmt::Write;
            let _ = writeln!(s, "{:.17e},{:.17e}", z.re, z.im);
        }
    }
    s.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn viewport_corner_validation() {
        assert!(Viewport::from_corners(-1.0, -1.0, 1.0, 1.0).is_ok());
        assert!(matches!(
            Viewport::from_corners(1.0, -1.0, -1.0, 1.0),
            Err(Error::InvalidRaster(_))
        ));
        assert!(matches!(
            Viewport::new(Complex64::ZERO, 0.0, 1.0),
            Err(Error::InvalidRaster(_))
        ));
    }

    #[test]
    fn pixel_point_round_trip() {
        let vp = Viewport::from_corners(-2.0, -1.0, 2.0, 1.0).unwrap();
        let (w, h) = (64, 32);
        for (col, row) in [(0, 0), (63, 31), (10, 20), (32, 16)] {
            let z = vp.pixel_to_point(w, h, col, row);
            assert_eq!(vp.point_to_pixel(w, h, z), Some((col, row)));
        }
        assert_eq!(vp.point_to_pixel(w, h, Complex64::new(5.0, 0.0)), None);
    }

    #[test]
    fn ppm_header_and_size() {
        let rgb = vec![7u8; 4 * 3 * 3];
        let bytes = ppm_bytes(4, 3, &rgb);
        assert!(bytes.starts_with(b"P6\n4 3\n255\n"));
        assert_eq!(bytes.len(), 11 + 36);
    }

    #[test]
    fn png_bytes_deterministic() {
        let rgb: Vec<u8> = (0..(8 * 8 * 3)).map(|i| (i * 37 % 256) as u8).collect();
        let a = png_bytes(8, 8, &rgb).unwrap();
        let b = png_bytes(8, 8, &rgb).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with(&[0x89, b'P', b'N', b'G']));
    }

    #[test]
    fn csv_skips_infinity() {
        let pts = [
            ExtendedComplex::finite(Complex64::new(1.0, 2.0)),
            ExtendedComplex::Infinity,
        ];
        let bytes = cloud_csv_bytes("test run", &pts);
        let s = String::from_utf8(bytes).unwrap();
        assert!(s.starts_with("# test run points=2 skipped_infinite=1\nx,y\n"));
        assert_eq!(s.lines().count(), 3);
    }
}
