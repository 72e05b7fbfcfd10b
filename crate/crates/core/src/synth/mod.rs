//! Synthetic collar scenes: a gently undulating table-top surface with one
//! or more Gaussian-profile ridges ("folds") planted along circular arcs,
//! rendered to a depth image through a pinhole camera looking straight down.
//!
//! Surface model in camera coordinates: the surface is `z = Z(x, y) =
//! table_depth − H(x, y)` with `H = base + Σ ridge_k`, where
//! `ridge_k = h · exp(−d_k² / (2 w²))` and `d_k` is the distance from
//! `(x, y)` to the k-th fold curve. The ground-truth mask holds the pixels
//! whose surface point lies within `2 w` of a fold curve.

mod bundle;
mod oracle;
mod trial;

pub use bundle::{load_scene, save_scene, SceneFile, SCENE_SCHEMA};
pub use oracle::{oracle_grasp, oracle_sigma, OracleGrasp};
pub use trial::{run_batch, run_trial, SuccessCriterion, TrialOutcome, TrialReport, TRIAL_REPORT_SCHEMA};

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::camera::CameraIntrinsics;
use crate::error::{Error, Result};
use crate::image::{BinaryMask, DepthImage};
use crate::linalg::Vec3;
use crate::mask_ops::cluster_mask;

/// Planar curve along which a ridge is planted (table coordinates `x, y`
/// in meters, camera frame).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FoldShape {
    /// Arc of `radius` around `center`, from angle `start` sweeping
    /// counter-clockwise by `span` (radians).
    Arc {
        center: [f64; 2],
        radius: f64,
        start: f64,
        span: f64,
    },
    /// Straight segment `a → b`.
    Segment { a: [f64; 2], b: [f64; 2] },
}

impl FoldShape {
    pub fn length(&self) -> f64 {
        match *self {
            FoldShape::Arc { radius, span, .. } => radius * span,
            FoldShape::Segment { a, b } => (b[0] - a[0]).hypot(b[1] - a[1]),
        }
    }

    /// Point at arc-length fraction `s ∈ [0, 1]`.
    pub fn point_at(&self, s: f64) -> [f64; 2] {
        match *self {
            FoldShape::Arc {
                center,
                radius,
                start,
                span,
            } => {
                let a = start + s * span;
                [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
            }
            FoldShape::Segment { a, b } => [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])],
        }
    }

    /// Closest point of the curve to `p`.
    pub fn closest(&self, p: [f64; 2]) -> [f64; 2] {
        match *self {
            FoldShape::Arc {
                center,
                radius,
                start,
                span,
            } => {
                let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
                let theta = dy.atan2(dx);
                let rel = (theta - start).rem_euclid(TAU);
                if rel <= span && (dx != 0.0 || dy != 0.0) {
                    [center[0] + radius * theta.cos(), center[1] + radius * theta.sin()]
                } else {
                    let (e0, e1) = (self.point_at(0.0), self.point_at(1.0));
                    if dist2(p, e0) <= dist2(p, e1) {
                        e0
                    } else {
                        e1
                    }
                }
            }
            FoldShape::Segment { a, b } => {
                let (ux, uy) = (b[0] - a[0], b[1] - a[1]);
                let len2 = ux * ux + uy * uy;
                let t = if len2 > 0.0 {
                    (((p[0] - a[0]) * ux + (p[1] - a[1]) * uy) / len2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                [a[0] + t * ux, a[1] + t * uy]
            }
        }
    }

    pub fn distance(&self, p: [f64; 2]) -> f64 {
        dist2(p, self.closest(p)).sqrt()
    }
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// One sinusoidal component of the base surface.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wave {
    pub amplitude: f64,
    /// Wave vector, radians per meter.
    pub k: [f64; 2],
    pub phase: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SceneParams {
    pub width: usize,
    pub height: usize,
    pub focal: f64,
    /// Depth units per meter are `1 / depth_scale`.
    pub depth_scale: f64,
    pub table_depth: f64,
    pub ridge_height: f64,
    /// Standard deviation of the Gaussian ridge profile.
    pub ridge_width: f64,
    pub ridge_count: usize,
    /// When several ridges are planted, resample until their masks form
    /// separate clusters at the default link distance.
    pub disjoint: bool,
    /// Straight ridges instead of arcs.
    pub straight: bool,
    pub arc_radius: [f64; 2],
    /// Degrees.
    pub arc_span: [f64; 2],
    /// Total amplitude of the base undulation.
    pub base_amplitude: f64,
    pub base_min_wavelength: f64,
    pub noise_std: f64,
}

impl Default for SceneParams {
    fn default() -> Self {
        Self {
            width: 320,
            height: 240,
            focal: 320.0,
            depth_scale: 0.001,
            table_depth: 0.70,
            ridge_height: 0.02,
            ridge_width: 0.01,
            ridge_count: 1,
            disjoint: true,
            straight: false,
            arc_radius: [0.06, 0.10],
            arc_span: [100.0, 160.0],
            base_amplitude: 0.004,
            base_min_wavelength: 0.25,
            noise_std: 0.0005,
        }
    }
}

const BASE_WAVES: usize = 3;
const MAX_LAYOUT_ATTEMPTS: usize = 200;
/// Cluster link distance (pixels) used to check ridge separation.
const SEPARATION_LINK: f64 = 10.0;

impl SceneParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("focal", self.focal),
            ("depth_scale", self.depth_scale),
            ("table_depth", self.table_depth),
            ("ridge_height", self.ridge_height),
            ("ridge_width", self.ridge_width),
            ("base_min_wavelength", self.base_min_wavelength),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.noise_std >= 0.0) || !(self.base_amplitude >= 0.0) {
            return Err(Error::InvalidInput("noise_std and base_amplitude must be >= 0".into()));
        }
        if self.width < 2 || self.height < 2 || self.ridge_count == 0 {
            return Err(Error::InvalidInput(
                "image must be at least 2x2 and hold at least one ridge".into(),
            ));
        }
        let ordered = |r: [f64; 2]| r[0] > 0.0 && r[0] <= r[1];
        if !ordered(self.arc_radius) || !ordered(self.arc_span) || self.arc_span[1] >= 360.0 {
            return Err(Error::InvalidInput("arc ranges must be positive and ordered".into()));
        }
        if self.table_depth - self.ridge_height - 2.0 * self.base_amplitude <= 0.0 {
            return Err(Error::InvalidInput("surface would reach the camera".into()));
        }
        Ok(())
    }

    pub fn intrinsics(&self) -> CameraIntrinsics<f64> {
        CameraIntrinsics::new(
            self.focal,
            self.focal,
            self.width as f64 / 2.0,
            self.height as f64 / 2.0,
            self.depth_scale,
        )
        .expect("validated parameters")
    }

    /// Band half-width of the ground-truth mask.
    pub fn band(&self) -> f64 {
        2.0 * self.ridge_width
    }
}

/// Analytic height field above the table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Surface {
    pub table_depth: f64,
    pub ridge_height: f64,
    pub ridge_width: f64,
    pub folds: Vec<FoldShape>,
    pub waves: Vec<Wave>,
}

impl Surface {
    /// Height of ridge `k` and its gradient.
    fn ridge(&self, k: usize, p: [f64; 2]) -> (f64, [f64; 2]) {
        let q = self.folds[k].closest(p);
        let w2 = self.ridge_width * self.ridge_width;
        let h = self.ridge_height * (-dist2(p, q) / (2.0 * w2)).exp();
        (h, [-h * (p[0] - q[0]) / w2, -h * (p[1] - q[1]) / w2])
    }

    /// Height `H` above the table and its gradient.
    pub fn height(&self, p: [f64; 2]) -> (f64, [f64; 2]) {
        let mut h = 0.0;
        let mut g = [0.0, 0.0];
        for w in &self.waves {
            let arg = w.k[0] * p[0] + w.k[1] * p[1] + w.phase;
            h += w.amplitude * arg.sin();
            let c = w.amplitude * arg.cos();
            g[0] += c * w.k[0];
            g[1] += c * w.k[1];
        }
        for k in 0..self.folds.len() {
            let (rh, rg) = self.ridge(k, p);
            h += rh;
            g[0] += rg[0];
            g[1] += rg[1];
        }
        (h, g)
    }

    pub fn depth_at(&self, p: [f64; 2]) -> f64 {
        self.table_depth - self.height(p).0
    }

    /// Unit surface normal at `(x, y)`, facing the camera (`z < 0`).
    pub fn normal(&self, p: [f64; 2]) -> Vec3<f64> {
        let (_, g) = self.height(p);
        let n = Vec3::new(-g[0], -g[1], -1.0);
        n / n.norm()
    }

    /// Intersects the ray through normalized image coordinates
    /// `(a, b) = ((u − cx)/fx, (v − cy)/fy)` with the surface; returns the
    /// depth `z` of the hit.
    pub fn ray_depth(&self, a: f64, b: f64) -> f64 {
        // Newton on f(z) = z − Z(a z, b z).
        let mut z = self.table_depth;
        for _ in 0..50 {
            let (h, g) = self.height([a * z, b * z]);
            let f = z - (self.table_depth - h);
            let df = 1.0 + g[0] * a + g[1] * b;
            let step = f / df;
            z -= step;
            if step.abs() < 1e-14 {
                break;
            }
        }
        z
    }

    /// Distance from `(x, y)` to the nearest fold curve and its index.
    pub fn nearest_fold(&self, p: [f64; 2]) -> (usize, f64) {
        self.folds
            .iter()
            .map(|f| f.distance(p))
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, d)| if d < best.1 { (i, d) } else { best })
    }
}

/// A planted fold as a dense 3-D polyline on the crest, with the surface
/// normal at every vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct FoldCurve {
    pub points: Vec<Vec3<f64>>,
    pub normals: Vec<Vec3<f64>>,
    /// Ground-truth pixels closer to this fold than to any other.
    pub mask_pixels: usize,
}

impl FoldCurve {
    /// Distance from `p` to the polyline and the index of the vertex whose
    /// segment holds the closest point (the nearer segment end).
    pub fn distance(&self, p: Vec3<f64>) -> (f64, usize) {
        if self.points.len() == 1 {
            return (p.distance(self.points[0]), 0);
        }
        let mut best = (f64::INFINITY, 0);
        for i in 0..self.points.len() - 1 {
            let (a, b) = (self.points[i], self.points[i + 1]);
            let ab = b - a;
            let len2 = ab.norm_squared();
            let t = if len2 > 0.0 {
                ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let d = p.distance(a + ab * t);
            if d < best.0 {
                best = (d, if t < 0.5 { i } else { i + 1 });
            }
        }
        best
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticScene {
    pub seed: u64,
    pub params: SceneParams,
    pub intrinsics: CameraIntrinsics<f64>,
    pub depth: DepthImage,
    pub gt_mask: BinaryMask,
    pub surface: Surface,
    pub folds: Vec<FoldCurve>,
    /// Noisy depth in meters before quantization (row-major). Only present
    /// on freshly generated scenes.
    pub range_m: Option<Vec<f64>>,
}

impl SyntheticScene {
    /// The first (for single-ridge scenes, the only) fold.
    pub fn fold_curve(&self) -> &FoldCurve {
        &self.folds[0]
    }

    /// Nearest fold to `p`: `(fold index, distance, vertex index)`.
    pub fn nearest_fold_point(&self, p: Vec3<f64>) -> (usize, f64, usize) {
        self.folds
            .iter()
            .enumerate()
            .map(|(k, f)| {
                let (d, v) = f.distance(p);
                (k, d, v)
            })
            .fold((0, f64::INFINITY, 0), |best, c| if c.1 < best.1 { c } else { best })
    }
}

fn uniform(rng: &mut ChaCha8Rng, range: [f64; 2]) -> f64 {
    if range[0] == range[1] {
        range[0]
    } else {
        rng.random_range(range[0]..range[1])
    }
}

/// Random fold with its extent kept inside the central part of the view.
fn random_fold(rng: &mut ChaCha8Rng, p: &SceneParams) -> FoldShape {
    let half_w = p.width as f64 / 2.0 / p.focal * p.table_depth;
    let half_h = p.height as f64 / 2.0 / p.focal * p.table_depth;
    let margin = p.band() + 0.01;
    let radius = uniform(rng, p.arc_radius);
    let span = uniform(rng, p.arc_span).to_radians();
    let start = rng.random_range(0.0..TAU);
    if p.straight {
        let len = radius * span;
        let reach_x = (half_w - margin - len / 2.0).max(0.0);
        let reach_y = (half_h - margin - len / 2.0).max(0.0);
        let mid = [rng.random_range(-1.0..=1.0) * reach_x, rng.random_range(-1.0..=1.0) * reach_y];
        let (dx, dy) = (start.cos() * len / 2.0, start.sin() * len / 2.0);
        return FoldShape::Segment {
            a: [mid[0] - dx, mid[1] - dy],
            b: [mid[0] + dx, mid[1] + dy],
        };
    }
    let reach_x = (half_w - margin - radius).max(0.0);
    let reach_y = (half_h - margin - radius).max(0.0);
    let center = [rng.random_range(-1.0..=1.0) * reach_x, rng.random_range(-1.0..=1.0) * reach_y];
    FoldShape::Arc {
        center,
        radius,
        start,
        span,
    }
}

fn random_waves(rng: &mut ChaCha8Rng, p: &SceneParams) -> Vec<Wave> {
    (0..BASE_WAVES)
        .map(|_| {
            let lambda = rng.random_range(p.base_min_wavelength..2.0 * p.base_min_wavelength);
            let dir = rng.random_range(0.0..TAU);
            let kmag = TAU / lambda;
            Wave {
                amplitude: p.base_amplitude / BASE_WAVES as f64,
                k: [kmag * dir.cos(), kmag * dir.sin()],
                phase: rng.random_range(0.0..TAU),
            }
        })
        .collect()
}

/// Per-pixel surface hits `(x, y, z)` for the whole image.
fn render(surface: &Surface, intr: &CameraIntrinsics<f64>, w: usize, h: usize) -> Vec<Vec3<f64>> {
    use rayon::prelude::*;
    (0..w * h)
        .into_par_iter()
        .map(|i| {
            let (r, c) = (i / w, i % w);
            let a = (c as f64 - intr.cx) / intr.fx;
            let b = (r as f64 - intr.cy) / intr.fy;
            let z = surface.ray_depth(a, b);
            Vec3::new(a * z, b * z, z)
        })
        .collect()
}

fn band_mask(surface: &Surface, hits: &[Vec3<f64>], band: f64, w: usize, h: usize) -> (BinaryMask, Vec<usize>) {
    let mut mask = BinaryMask::empty(w, h);
    let mut per_fold = vec![0; surface.folds.len()];
    for (i, p) in hits.iter().enumerate() {
        let (k, d) = surface.nearest_fold([p.x, p.y]);
        if d <= band {
            mask.set(i / w, i % w, true);
            per_fold[k] += 1;
        }
    }
    (mask, per_fold)
}

fn fold_curve(surface: &Surface, k: usize, mask_pixels: usize) -> FoldCurve {
    let shape = surface.folds[k];
    let n = (shape.length() / 0.001).ceil().max(1.0) as usize + 1;
    let mut points = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    for i in 0..n {
        let q = shape.point_at(i as f64 / (n - 1) as f64);
        points.push(Vec3::new(q[0], q[1], surface.depth_at(q)));
        normals.push(surface.normal(q));
    }
    FoldCurve {
        points,
        normals,
        mask_pixels,
    }
}

/// Generates a scene. Fully determined by `(params, seed)`.
pub fn generate_scene(params: &SceneParams, seed: u64) -> Result<SyntheticScene> {
    params.validate()?;
    let (w, h) = (params.width, params.height);
    let intr = params.intrinsics();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut attempt = 0;
    let (surface, hits, mask, per_fold) = loop {
        let folds: Vec<FoldShape> = (0..params.ridge_count).map(|_| random_fold(&mut rng, params)).collect();
        let waves = random_waves(&mut rng, params);
        let surface = Surface {
            table_depth: params.table_depth,
            ridge_height: params.ridge_height,
            ridge_width: params.ridge_width,
            folds,
            waves,
        };
        let hits = render(&surface, &intr, w, h);
        let (mask, per_fold) = band_mask(&surface, &hits, params.band(), w, h);
        let separated = !params.disjoint
            || params.ridge_count == 1
            || cluster_mask(&mask, SEPARATION_LINK)?.len() == params.ridge_count;
        attempt += 1;
        if separated {
            break (surface, hits, mask, per_fold);
        }
        if attempt >= MAX_LAYOUT_ATTEMPTS {
            return Err(Error::InvalidInput(format!(
                "could not place {} separated ridges in {MAX_LAYOUT_ATTEMPTS} attempts",
                params.ridge_count
            )));
        }
    };

    let noise = Normal::new(0.0, params.noise_std)
        .map_err(|e| Error::InvalidInput(format!("noise: {e}")))?;
    let mut range_m = Vec::with_capacity(w * h);
    let mut raw = Vec::with_capacity(w * h);
    for p in &hits {
        let z = if params.noise_std > 0.0 {
            p.z + noise.sample(&mut rng)
        } else {
            p.z
        };
        range_m.push(z);
        raw.push((z / params.depth_scale).round().clamp(1.0, f64::from(u16::MAX)) as u16);
    }
    let depth = DepthImage::new(w, h, raw)?;
    let folds = (0..surface.folds.len())
        .map(|k| fold_curve(&surface, k, per_fold[k]))
        .collect();

    Ok(SyntheticScene {
        seed,
        params: *params,
        intrinsics: intr,
        depth,
        gt_mask: mask,
        surface,
        folds,
        range_m: Some(range_m),
    })
}

/// Angle in degrees between two directions.
pub fn angle_deg(a: Vec3<f64>, b: Vec3<f64>) -> f64 {
    let c = a.dot(b) / (a.norm() * b.norm());
    c.clamp(-1.0, 1.0).acos() * 180.0 / PI
}
