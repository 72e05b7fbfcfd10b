//! Scene bundles on disk: `depth.png`, `mask.png`, `camera.json` and
//! `scene.json` in one directory.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FoldCurve, SceneParams, Surface, SyntheticScene};
use crate::error::{Error, Result};
use crate::io::{self, CameraJson};
use crate::linalg::Vec3;

pub const SCENE_SCHEMA: &str = "collar-grasp/scene/v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoldJson {
    pub points: Vec<[f64; 3]>,
    pub normals: Vec<[f64; 3]>,
    pub mask_pixels: usize,
}

/// Contents of `scene.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub schema: String,
    pub seed: u64,
    pub params: SceneParams,
    pub camera: CameraJson,
    pub depth: String,
    pub mask: String,
    pub surface: Surface,
    pub folds: Vec<FoldJson>,
}

pub fn save_scene(dir: &Path, scene: &SyntheticScene) -> Result<()> {
    let camera = CameraJson::from_intrinsics(&scene.intrinsics);
    io::write_depth_png(&dir.join("depth.png"), &scene.depth)?;
    io::write_mask_png(&dir.join("mask.png"), &scene.gt_mask)?;
    io::write_json(&dir.join("camera.json"), &camera)?;
    let file = SceneFile {
        schema: SCENE_SCHEMA.into(),
        seed: scene.seed,
        params: scene.params,
        camera,
        depth: "depth.png".into(),
        mask: "mask.png".into(),
        surface: scene.surface.clone(),
        folds: scene
            .folds
            .iter()
            .map(|f| FoldJson {
                points: f.points.iter().map(|p| p.to_array()).collect(),
                normals: f.normals.iter().map(|p| p.to_array()).collect(),
                mask_pixels: f.mask_pixels,
            })
            .collect(),
    };
    io::write_json(&dir.join("scene.json"), &file)
}

pub fn load_scene(dir: &Path) -> Result<SyntheticScene> {
    let path = dir.join("scene.json");
    let file: SceneFile = io::read_json(&path)?;
    if file.schema != SCENE_SCHEMA {
        return Err(Error::InvalidInput(format!(
            "{}: unsupported schema `{}`",
            path.display(),
            file.schema
        )));
    }
    let depth = io::read_depth_png(&dir.join(&file.depth))?;
    let gt_mask = io::read_mask_png(&dir.join(&file.mask))?;
    gt_mask.ensure_same_dims(depth.dims())?;
    let folds = file
        .folds
        .into_iter()
        .map(|f| {
            if f.points.is_empty() || f.points.len() != f.normals.len() {
                return Err(Error::InvalidInput(format!(
                    "{}: fold needs matching, non-empty points and normals",
                    path.display()
                )));
            }
            Ok(FoldCurve {
                points: f.points.into_iter().map(Vec3::from_array).collect(),
                normals: f.normals.into_iter().map(Vec3::from_array).collect(),
                mask_pixels: f.mask_pixels,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if folds.is_empty() {
        return Err(Error::InvalidInput(format!("{}: no folds", path.display())));
    }
    Ok(SyntheticScene {
        seed: file.seed,
        params: file.params,
        intrinsics: file.camera.intrinsics()?,
        depth,
        gt_mask,
        surface: file.surface,
        folds,
        range_m: None,
    })
}
