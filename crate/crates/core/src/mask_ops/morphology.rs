//! Binary dilation, erosion and closing with square structuring elements.

use crate::error::{Error, Result};
use crate::image::BinaryMask;

fn check(radius: usize, iterations: usize) -> Result<()> {
    if radius == 0 || iterations == 0 {
        return Err(Error::InvalidInput(format!(
            "morphology needs radius >= 1 and iterations >= 1 (got {radius}, {iterations})"
        )));
    }
    Ok(())
}

/// Dilation by a `(2·radius+1)²` square, repeated `iterations` times.
/// Pixels outside the image count as background.
pub fn dilate(mask: &BinaryMask, radius: usize, iterations: usize) -> Result<BinaryMask> {
    check(radius, iterations)?;
    let mut out = mask.clone();
    for _ in 0..iterations {
        out = square_filter(&out, radius, false, false);
    }
    Ok(out)
}

/// Erosion by a `(2·radius+1)²` square. Pixels outside the image count as
/// background, so set pixels within `radius` of the border are removed.
pub fn erode(mask: &BinaryMask, radius: usize, iterations: usize) -> Result<BinaryMask> {
    check(radius, iterations)?;
    let mut out = mask.clone();
    for _ in 0..iterations {
        out = square_filter(&out, radius, true, false);
    }
    Ok(out)
}

/// Dilation followed by erosion with the same element.
///
/// The erosion treats the outside as foreground so that closing never
/// removes pixels of the input that touch the border.
pub fn close(mask: &BinaryMask, radius: usize, iterations: usize) -> Result<BinaryMask> {
    let dilated = dilate(mask, radius, iterations)?;
    let mut out = dilated;
    for _ in 0..iterations {
        out = square_filter(&out, radius, true, true);
    }
    Ok(out)
}

/// Separable square max (`all == false`) or min (`all == true`) filter.
/// `outside_set` decides whether out-of-image pixels count as foreground
/// for the min filter.
fn square_filter(mask: &BinaryMask, radius: usize, all: bool, outside_set: bool) -> BinaryMask {
    let (w, h) = mask.dims();
    // First pass filters rows and emits a w×h transposed buffer; the second
    // pass filters what were columns and transposes back.
    let rows = pass(w, h, radius, all, outside_set, |r, c| mask.get(r, c));
    let both = pass(h, w, radius, all, outside_set, |r, c| rows[r * h + c]);
    BinaryMask::new(w, h, both).expect("dims preserved")
}

/// Sliding-window any/all along the rows of an `h × w` raster read through
/// `get`, written out transposed (`w × h`).
fn pass(
    w: usize,
    h: usize,
    radius: usize,
    all: bool,
    outside_set: bool,
    get: impl Fn(usize, usize) -> bool,
) -> Vec<bool> {
    let mut out = vec![false; w * h];
    let mut prefix = vec![0usize; w + 1];
    for r in 0..h {
        for c in 0..w {
            prefix[c + 1] = prefix[c] + usize::from(get(r, c));
        }
        for c in 0..w {
            let lo = c.saturating_sub(radius);
            let hi = (c + radius).min(w - 1);
            let count = prefix[hi + 1] - prefix[lo];
            let value = if all {
                let window = hi + 1 - lo;
                let clipped = c < radius || c + radius >= w;
                count == window && (outside_set || !clipped)
            } else {
                count > 0
            };
            out[c * h + r] = value;
        }
    }
    out
}
