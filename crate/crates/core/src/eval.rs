//! Segmentation metrics: IoU, recall and precision from per-pixel
//! confusion counts, with micro- or macro-averaged batch evaluation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, AddAssign};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::BinaryMask;
use crate::io;
use crate::labeler::ManifestEntry;

/// Pixel counts with the collar as positive class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

impl Add for ConfusionCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
            tn: self.tn + o.tn,
        }
    }
}

impl AddAssign for ConfusionCounts {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

pub fn confusion(pred: &BinaryMask, gt: &BinaryMask) -> Result<ConfusionCounts> {
    if pred.dims() != gt.dims() {
        return Err(Error::DimensionMismatch {
            left: pred.dims(),
            right: gt.dims(),
        });
    }
    let mut c = ConfusionCounts::default();
    for (&p, &g) in pred.bits().iter().zip(gt.bits()) {
        match (p, g) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub iou: f64,
    pub recall: f64,
    pub precision: f64,
}

/// A ratio and whether its denominator was zero (in which case it is 1).
fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (1.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

impl Metrics {
    /// Metrics plus a flag telling whether any of them fell back to the
    /// empty-denominator convention.
    pub fn from_counts(c: &ConfusionCounts) -> (Self, bool) {
        let (iou, e1) = ratio(c.tp, c.tp + c.fp + c.fn_);
        let (recall, e2) = ratio(c.tp, c.tp + c.fn_);
        let (precision, e3) = ratio(c.tp, c.tp + c.fp);
        (
            Self {
                iou,
                recall,
                precision,
            },
            e1 || e2 || e3,
        )
    }
}

/// `(iou, recall, precision)`; each is 1.0 when its denominator is zero.
pub fn metrics(c: &ConfusionCounts) -> (f64, f64, f64) {
    let (m, _) = Metrics::from_counts(c);
    (m.iou, m.recall, m.precision)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Metrics of the summed counts.
    #[default]
    Micro,
    /// Mean of per-pair metrics.
    Macro,
}

/// Metrics over one group of pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub iou: f64,
    pub recall: f64,
    pub precision: f64,
    pub counts: ConfusionCounts,
    pub pairs: usize,
    /// Pairs for which a metric used the empty-denominator convention.
    pub empty_convention_pairs: usize,
    /// Whether a metric of the summed counts used that convention.
    pub empty_convention_aggregate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub schema: String,
    pub averaging: Averaging,
    pub overall: GroupReport,
    /// Present only when manifest entries carry garment ids.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub per_garment: BTreeMap<String, GroupReport>,
}

pub const METRIC_REPORT_SCHEMA: &str = "collar-grasp/metric_report/v1";

fn group(items: &[(ConfusionCounts, Option<&str>)], averaging: Averaging) -> GroupReport {
    let counts = items.iter().fold(ConfusionCounts::default(), |a, (c, _)| a + *c);
    let (agg, empty_agg) = Metrics::from_counts(&counts);
    let per: Vec<(Metrics, bool)> = items.iter().map(|(c, _)| Metrics::from_counts(c)).collect();
    let m = match averaging {
        Averaging::Micro => agg,
        Averaging::Macro if per.is_empty() => agg,
        Averaging::Macro => {
            let n = per.len() as f64;
            let mean = |f: fn(&Metrics) -> f64| per.iter().map(|(m, _)| f(m)).sum::<f64>() / n;
            Metrics {
                iou: mean(|m| m.iou),
                recall: mean(|m| m.recall),
                precision: mean(|m| m.precision),
            }
        }
    };
    GroupReport {
        iou: m.iou,
        recall: m.recall,
        precision: m.precision,
        counts,
        pairs: items.len(),
        empty_convention_pairs: per.iter().filter(|(_, e)| *e).count(),
        empty_convention_aggregate: empty_agg,
    }
}

/// Report from already computed per-pair counts.
pub fn report_from_counts(
    items: &[(ConfusionCounts, Option<&str>)],
    averaging: Averaging,
) -> MetricReport {
    let mut by_garment: BTreeMap<&str, Vec<(ConfusionCounts, Option<&str>)>> = BTreeMap::new();
    for &(c, g) in items {
        if let Some(g) = g {
            by_garment.entry(g).or_default().push((c, Some(g)));
        }
    }
    MetricReport {
        schema: METRIC_REPORT_SCHEMA.into(),
        averaging,
        overall: group(items, averaging),
        per_garment: by_garment
            .into_iter()
            .map(|(g, v)| (g.to_owned(), group(&v, averaging)))
            .collect(),
    }
}

/// Report over in-memory `(prediction, ground truth, garment)` triples.
pub fn evaluate_pairs(
    pairs: &[(BinaryMask, BinaryMask, Option<String>)],
    averaging: Averaging,
) -> Result<MetricReport> {
    let counts: Vec<ConfusionCounts> = pairs
        .par_iter()
        .map(|(p, g, _)| confusion(p, g))
        .collect::<Result<_>>()?;
    let items: Vec<_> = counts
        .into_iter()
        .zip(pairs)
        .map(|(c, (_, _, g))| (c, g.as_deref()))
        .collect();
    Ok(report_from_counts(&items, averaging))
}

/// Where the prediction for `entry` is looked up: `pred_dir/<garment>/<mask
/// file name>` when that exists, otherwise `pred_dir/<mask file name>`.
pub fn prediction_path(entry: &ManifestEntry, pred_dir: &Path) -> PathBuf {
    let name = entry.mask.file_name().unwrap_or(entry.mask.as_os_str());
    if let Some(g) = &entry.garment {
        let nested = pred_dir.join(g).join(name);
        if nested.is_file() {
            return nested;
        }
    }
    pred_dir.join(name)
}

/// Evaluates every manifest entry's ground-truth mask against the
/// same-named prediction in `pred_dir`.
pub fn evaluate_set(
    entries: &[ManifestEntry],
    pred_dir: &Path,
    averaging: Averaging,
) -> Result<MetricReport> {
    let preds: Vec<PathBuf> = entries.iter().map(|e| prediction_path(e, pred_dir)).collect();
    let missing: Vec<String> = preds
        .iter()
        .filter(|p| !p.is_file())
        .map(|p| p.display().to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingPredictions(missing));
    }
    let counts: Vec<ConfusionCounts> = entries
        .par_iter()
        .zip(&preds)
        .map(|(e, p)| {
            let pred = io::read_mask_png(p)?;
            let gt = io::read_mask_png(&e.mask)?;
            confusion(&pred, &gt)
        })
        .collect::<Result<_>>()?;
    let items: Vec<_> = counts
        .into_iter()
        .zip(entries)
        .map(|(c, e)| (c, e.garment.as_deref()))
        .collect();
    Ok(report_from_counts(&items, averaging))
}

impl MetricReport {
    /// Aligned text table: one column per garment plus an overall column,
    /// rows Recall, Precision, IoU.
    pub fn to_table(&self) -> String {
        let mut cols: Vec<(&str, &GroupReport)> =
            self.per_garment.iter().map(|(g, r)| (g.as_str(), r)).collect();
        cols.push(("overall", &self.overall));
        let width = cols.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(6);

        let mut out = String::new();
        let _ = write!(out, "{:<10}", "");
        for (name, _) in &cols {
            let _ = write!(out, "  {name:>width$}");
        }
        out.push('\n');
        type Column = fn(&GroupReport) -> f64;
        let rows: [(&str, Column); 3] = [
            ("Recall", |r| r.recall),
            ("Precision", |r| r.precision),
            ("IoU", |r| r.iou),
        ];
        for (label, f) in rows {
            let _ = write!(out, "{label:<10}");
            for (_, r) in &cols {
                let _ = write!(out, "  {:>width$.3}", f(r));
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "({} averaging, {} pairs, {} used the empty-mask convention)",
            match self.averaging {
                Averaging::Micro => "micro",
                Averaging::Macro => "macro",
            },
            self.overall.pairs,
            self.overall.empty_convention_pairs
        );
        out
    }
}
