//! Ground-truth extraction from RGB frames of blue-painted collars and
//! dataset manifest assembly.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{BinaryMask, RgbImage};
use crate::io;

/// Hexcone RGB→HSV. Hue in degrees `[0, 360)` (0 for grays), saturation and
/// value in `[0, 1]`.
pub fn rgb_to_hsv(r: u8, g: u8, b: u8) -> (f64, f64, f64) {
    let (rf, gf, bf) = (f64::from(r), f64::from(g), f64::from(b));
    let max = rf.max(gf).max(bf);
    let min = rf.min(gf).min(bf);
    let delta = max - min;
    let v = max / 255.0;
    let s = if max == 0.0 { 0.0 } else { delta / max };
    if delta == 0.0 {
        return (0.0, s, v);
    }
    let h = if max == rf {
        60.0 * ((gf - bf) / delta)
    } else if max == gf {
        60.0 * ((bf - rf) / delta + 2.0)
    } else {
        60.0 * ((rf - gf) / delta + 4.0)
    };
    let h = if h < 0.0 { h + 360.0 } else { h };
    (h, s, v)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HsvThresholds {
    pub h_min: f64,
    pub h_max: f64,
    pub s_min: f64,
    pub v_min: f64,
}

impl Default for HsvThresholds {
    fn default() -> Self {
        Self {
            h_min: 200.0,
            h_max: 260.0,
            s_min: 0.4,
            v_min: 0.2,
        }
    }
}

impl HsvThresholds {
    pub fn validate(&self) -> Result<()> {
        let hue = 0.0..360.0;
        let frac = 0.0..=1.0;
        if !hue.contains(&self.h_min) || !hue.contains(&self.h_max) || self.h_min >= self.h_max {
            return Err(Error::InvalidInput(format!(
                "hue window must satisfy 0 <= h_min < h_max < 360, got [{}, {}]",
                self.h_min, self.h_max
            )));
        }
        if !frac.contains(&self.s_min) || !frac.contains(&self.v_min) {
            return Err(Error::InvalidInput(format!(
                "s_min and v_min must lie in [0, 1], got {} and {}",
                self.s_min, self.v_min
            )));
        }
        Ok(())
    }

    pub fn accepts(&self, rgb: [u8; 3]) -> bool {
        let (h, s, v) = rgb_to_hsv(rgb[0], rgb[1], rgb[2]);
        h >= self.h_min && h <= self.h_max && s >= self.s_min && v >= self.v_min
    }
}

pub fn extract_blue_mask(img: &RgbImage, th: &HsvThresholds) -> BinaryMask {
    let bits = img
        .data()
        .chunks_exact(3)
        .map(|px| th.accepts([px[0], px[1], px[2]]))
        .collect();
    BinaryMask::new(img.width(), img.height(), bits).expect("one bit per pixel")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

/// One manifest line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub depth: PathBuf,
    pub mask: PathBuf,
    pub frame: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub garment: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetManifest {
    pub split: Split,
    pub shuffle_seed: u64,
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        write_manifest(path, &self.entries)
    }
}

pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<()> {
    let mut out = Vec::new();
    for e in entries {
        serde_json::to_writer(&mut out, e).map_err(|err| Error::json(path, err))?;
        out.push(b'\n');
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|err| Error::io(dir, err))?;
    }
    let mut f = fs::File::create(path).map_err(|err| Error::io(path, err))?;
    f.write_all(&out).map_err(|err| Error::io(path, err))
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| Error::json(path, e)))
        .collect()
}

/// Train/val/test fractions, each in `[0, 1]`, summing to 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitFractions {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitFractions {
    fn default() -> Self {
        Self {
            train: 0.72,
            val: 0.18,
            test: 0.10,
        }
    }
}

impl SplitFractions {
    pub fn new(train: f64, val: f64, test: f64) -> Result<Self> {
        let s = Self { train, val, test };
        let ok = [train, val, test].iter().all(|f| (0.0..=1.0).contains(f))
            && ((train + val + test) - 1.0).abs() <= 1e-6;
        if ok {
            Ok(s)
        } else {
            Err(Error::InvalidInput(format!(
                "split fractions must lie in [0, 1] and sum to 1, got {train},{val},{test}"
            )))
        }
    }

    /// Entry counts for `n` items. Boundaries are rounded cumulatively, so
    /// the three counts always sum to `n`.
    pub fn counts(&self, n: usize) -> [usize; 3] {
        let nf = n as f64;
        let a = ((nf * self.train).round() as usize).min(n);
        let b = ((nf * (self.train + self.val)).round() as usize).clamp(a, n);
        [a, b - a, n - b]
    }
}

impl std::str::FromStr for SplitFractions {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidInput(format!("cannot parse splits `{s}`")))?;
        match parts[..] {
            [a, b, c] => Self::new(a, b, c),
            _ => Err(Error::InvalidInput(format!(
                "splits need three comma-separated fractions, got `{s}`"
            ))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DatasetOptions {
    pub seed: u64,
    pub splits: SplitFractions,
    pub thresholds: HsvThresholds,
    /// Skip frames whose extracted mask is empty.
    pub drop_empty: bool,
    /// Directory with one subdirectory of frames per held-out garment.
    /// When set, those frames form the test split and the frames directory
    /// is divided between train and val only.
    pub test_garments: Option<PathBuf>,
}

/// An RGB/depth frame pair found on disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FramePair {
    pub index: u64,
    pub rgb: PathBuf,
    pub depth: PathBuf,
}

fn frame_index(name: &str) -> Option<u64> {
    let digits = name.strip_prefix("frame_")?.strip_suffix("_rgb.png")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

pub fn frame_file_name(index: u64, kind: &str) -> String {
    format!("frame_{index:06}_{kind}.png")
}

/// Finds `frame_%06d_rgb.png` files in `dir` and pairs each with its depth
/// frame, sorted by frame index.
pub fn discover_frames(dir: &Path) -> Result<Vec<FramePair>> {
    let mut frames = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name();
        let Some(index) = name.to_str().and_then(frame_index) else {
            continue;
        };
        let depth = dir.join(frame_file_name(index, "depth"));
        if !depth.is_file() {
            return Err(Error::MissingPair(depth));
        }
        frames.push(FramePair {
            index,
            rgb: entry.path(),
            depth,
        });
    }
    frames.sort_by_key(|f| f.index);
    Ok(frames)
}

/// Labels one frame, checking that depth and RGB dimensions agree.
pub fn label_frame(frame: &FramePair, th: &HsvThresholds) -> Result<BinaryMask> {
    let rgb = io::read_rgb_png(&frame.rgb)?;
    let depth = io::read_depth_png(&frame.depth)?;
    if depth.dims() != (rgb.width(), rgb.height()) {
        return Err(Error::DimensionMismatch {
            left: (rgb.width(), rgb.height()),
            right: depth.dims(),
        });
    }
    Ok(extract_blue_mask(&rgb, th))
}

/// Labels every frame in parallel, writes each mask to `mask_dir` and
/// returns the resulting entries in frame order.
fn label_all(
    frames: &[FramePair],
    mask_dir: &Path,
    garment: Option<&str>,
    opts: &DatasetOptions,
) -> Result<Vec<ManifestEntry>> {
    let labeled: Vec<Option<ManifestEntry>> = frames
        .par_iter()
        .map(|f| {
            let mask = label_frame(f, &opts.thresholds)?;
            if opts.drop_empty && mask.is_empty() {
                return Ok(None);
            }
            let mask_path = mask_dir.join(frame_file_name(f.index, "mask"));
            io::write_mask_png(&mask_path, &mask)?;
            Ok(Some(ManifestEntry {
                depth: f.depth.clone(),
                mask: mask_path,
                frame: f.index,
                garment: garment.map(str::to_owned),
            }))
        })
        .collect::<Result<_>>()?;
    Ok(labeled.into_iter().flatten().collect())
}

fn garment_dirs(root: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut dirs = Vec::new();
    for entry in fs::read_dir(root).map_err(|e| Error::io(root, e))? {
        let entry = entry.map_err(|e| Error::io(root, e))?;
        let path = entry.path();
        if path.is_dir() {
            let name = entry.file_name().to_string_lossy().into_owned();
            dirs.push((name, path));
        }
    }
    dirs.sort();
    Ok(dirs)
}

/// Labels all frames under `frames_dir`, writes masks to `out_dir/masks`
/// and returns train, val and test manifests (in that order).
///
/// Entry order is a ChaCha8 permutation of frame order seeded by
/// `opts.seed`; the split boundaries follow [`SplitFractions::counts`].
/// Manifests are not written; see [`write_dataset`].
pub fn build_dataset(
    frames_dir: &Path,
    out_dir: &Path,
    opts: &DatasetOptions,
) -> Result<[DatasetManifest; 3]> {
    opts.thresholds.validate()?;
    let mask_dir = out_dir.join("masks");
    let frames = discover_frames(frames_dir)?;
    let mut entries = label_all(&frames, &mask_dir, None, opts)?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    entries.shuffle(&mut rng);

    let (train, val, mut test) = match &opts.test_garments {
        None => {
            let [a, b, _] = opts.splits.counts(entries.len());
            let test = entries.split_off(a + b);
            let val = entries.split_off(a);
            (entries, val, test)
        }
        Some(root) => {
            let kept = opts.splits.train + opts.splits.val;
            if !(kept > 0.0) {
                return Err(Error::InvalidInput(
                    "train and val fractions cannot both be zero".into(),
                ));
            }
            let fr = SplitFractions {
                train: opts.splits.train / kept,
                val: opts.splits.val / kept,
                test: 0.0,
            };
            let [a, _, _] = fr.counts(entries.len());
            let val = entries.split_off(a);
            let mut test = Vec::new();
            for (name, dir) in garment_dirs(root)? {
                let frames = discover_frames(&dir)?;
                test.extend(label_all(&frames, &mask_dir.join(&name), Some(&name), opts)?);
            }
            (entries, val, test)
        }
    };
    if opts.test_garments.is_some() {
        test.shuffle(&mut rng);
    }

    let mk = |split, entries| DatasetManifest {
        split,
        shuffle_seed: opts.seed,
        entries,
    };
    Ok([
        mk(Split::Train, train),
        mk(Split::Val, val),
        mk(Split::Test, test),
    ])
}

/// [`build_dataset`] plus `train.jsonl`, `val.jsonl` and `test.jsonl` in
/// `out_dir`.
pub fn write_dataset(
    frames_dir: &Path,
    out_dir: &Path,
    opts: &DatasetOptions,
) -> Result<[DatasetManifest; 3]> {
    let manifests = build_dataset(frames_dir, out_dir, opts)?;
    for m in &manifests {
        m.write_jsonl(&out_dir.join(format!("{}.jsonl", m.split.as_str())))?;
    }
    Ok(manifests)
}
