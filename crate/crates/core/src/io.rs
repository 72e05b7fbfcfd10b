//! File formats: PNG rasters, camera JSON and ASCII PLY.
//!
//! * depth: 16-bit grayscale PNG, raw units (millimeters by default)
//! * rgb: 8-bit RGB PNG
//! * masks: 8-bit grayscale PNG, 0 = background, 255 = collar (any
//!   non-zero value reads as set)
//! * camera: JSON with `fx, fy, cx, cy, depth_scale` and/or `rotation`
//!   (9 numbers, row-major, camera→world) and `translation` (3 numbers)

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use image::{DynamicImage, GrayImage, ImageBuffer, Luma};
use serde::{Deserialize, Serialize};

use crate::camera::{CameraIntrinsics, Extrinsics, DEFAULT_DEPTH_SCALE};
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::image::{BinaryMask, DepthImage, RgbImage};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;

fn open(path: &Path) -> Result<DynamicImage> {
    image::open(path).map_err(|e| Error::image(path, e))
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(())
}

pub fn read_depth_png(path: &Path) -> Result<DepthImage> {
    match open(path)? {
        DynamicImage::ImageLuma16(img) => {
            let (w, h) = img.dimensions();
            DepthImage::new(w as usize, h as usize, img.into_raw())
        }
        other => Err(Error::InvalidInput(format!(
            "{}: depth must be a 16-bit grayscale PNG, found {:?}",
            path.display(),
            other.color()
        ))),
    }
}

pub fn write_depth_png(path: &Path, depth: &DepthImage) -> Result<()> {
    ensure_parent(path)?;
    let img: ImageBuffer<Luma<u16>, Vec<u16>> = ImageBuffer::from_raw(
        depth.width() as u32,
        depth.height() as u32,
        depth.data().to_vec(),
    )
    .expect("buffer length matches dimensions");
    img.save(path).map_err(|e| Error::image(path, e))
}

pub fn read_mask_png(path: &Path) -> Result<BinaryMask> {
    let img = open(path)?.into_luma8();
    let (w, h) = img.dimensions();
    let bits = img.into_raw().into_iter().map(|v| v != 0).collect();
    BinaryMask::new(w as usize, h as usize, bits)
}

pub fn write_mask_png(path: &Path, mask: &BinaryMask) -> Result<()> {
    ensure_parent(path)?;
    let raw = mask.bits().iter().map(|&b| if b { 255u8 } else { 0 }).collect();
    let img = GrayImage::from_raw(mask.width() as u32, mask.height() as u32, raw)
        .expect("buffer length matches dimensions");
    img.save(path).map_err(|e| Error::image(path, e))
}

pub fn read_rgb_png(path: &Path) -> Result<RgbImage> {
    let img = open(path)?.into_rgb8();
    let (w, h) = img.dimensions();
    RgbImage::new(w as usize, h as usize, img.into_raw())
}

pub fn write_rgb_png(path: &Path, rgb: &RgbImage) -> Result<()> {
    ensure_parent(path)?;
    let img = image::RgbImage::from_raw(rgb.width() as u32, rgb.height() as u32, rgb.data().to_vec())
        .expect("buffer length matches dimensions");
    img.save(path).map_err(|e| Error::image(path, e))
}

/// Camera calibration document. Intrinsic and extrinsic fields may live in
/// one file or in two separate ones.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<[f64; 9]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translation: Option<[f64; 3]>,
}

impl CameraJson {
    pub fn from_intrinsics<T: Real>(i: &CameraIntrinsics<T>) -> Self {
        Self {
            fx: Some(i.fx.to_f64_lossy()),
            fy: Some(i.fy.to_f64_lossy()),
            cx: Some(i.cx.to_f64_lossy()),
            cy: Some(i.cy.to_f64_lossy()),
            depth_scale: Some(i.depth_scale.to_f64_lossy()),
            ..Self::default()
        }
    }

    pub fn from_extrinsics<T: Real>(e: &Extrinsics<T>) -> Self {
        Self {
            rotation: Some(e.rotation().to_row_major().map(Real::to_f64_lossy)),
            translation: Some(e.translation().to_array().map(Real::to_f64_lossy)),
            ..Self::default()
        }
    }

    pub fn intrinsics<T: Real>(&self) -> Result<CameraIntrinsics<T>> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::InvalidInput(format!("camera JSON is missing `{name}`")))
        };
        CameraIntrinsics::new(
            T::lit(need(self.fx, "fx")?),
            T::lit(need(self.fy, "fy")?),
            T::lit(need(self.cx, "cx")?),
            T::lit(need(self.cy, "cy")?),
            T::lit(self.depth_scale.unwrap_or(DEFAULT_DEPTH_SCALE)),
        )
    }

    pub fn extrinsics<T: Real>(&self) -> Result<Extrinsics<T>> {
        let (Some(r), Some(t)) = (self.rotation, self.translation) else {
            return Err(Error::InvalidInput(
                "camera JSON needs both `rotation` and `translation`".into(),
            ));
        };
        Extrinsics::new(
            Mat3::from_row_major(r.map(T::lit)),
            Vec3::from_array(t.map(T::lit)),
        )
    }
}

pub fn read_json<D: serde::de::DeserializeOwned>(path: &Path) -> Result<D> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::json(path, e))
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    ensure_parent(path)?;
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::json(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_intrinsics<T: Real>(path: &Path) -> Result<CameraIntrinsics<T>> {
    read_json::<CameraJson>(path)?.intrinsics()
}

pub fn read_extrinsics<T: Real>(path: &Path) -> Result<Extrinsics<T>> {
    read_json::<CameraJson>(path)?.extrinsics()
}

/// Writes an ASCII PLY with `x y z` float vertices.
pub fn write_ply<T: Real>(path: &Path, cloud: &PointCloud<T>) -> Result<()> {
    ensure_parent(path)?;
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<fs::File>| -> std::io::Result<()> {
        writeln!(w, "ply")?;
        writeln!(w, "format ascii 1.0")?;
        writeln!(w, "comment frame {}", cloud.frame().as_str())?;
        writeln!(w, "element vertex {}", cloud.len())?;
        writeln!(w, "property float x")?;
        writeln!(w, "property float y")?;
        writeln!(w, "property float z")?;
        writeln!(w, "end_header")?;
        for p in cloud.points() {
            writeln!(w, "{} {} {}", p.x, p.y, p.z)?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| Error::io(path, e))
}
