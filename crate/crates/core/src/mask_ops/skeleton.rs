//! Zhang–Suen parallel thinning.
//!
//! Each iteration runs two sub-cycles. A pixel `P1` with neighbors
//!
//! ```text
//!   P9 P2 P3
//!   P8 P1 P4
//!   P7 P6 P5
//! ```
//!
//! is marked for deletion when `2 <= B(P1) <= 6` (set neighbors),
//! `A(P1) == 1` (0→1 transitions around P2..P9,P2) and
//! `P2·P4·P6 == 0 && P4·P6·P8 == 0` in the first sub-cycle, or
//! `P2·P4·P8 == 0 && P2·P6·P8 == 0` in the second. Marked pixels are
//! removed together; iteration stops when neither sub-cycle removes
//! anything.
//!
//! Plain Zhang–Suen erases some small components outright (a 2×2 block is
//! fully marked in the first sub-cycle). When every pixel of an
//! 8-connected component is marked, its smallest `(row, col)` pixel is kept.

use crate::image::BinaryMask;

/// Neighbor offsets P2..P9, clockwise from north.
const RING: [(isize, isize); 8] = [
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
];

fn ring(mask: &BinaryMask, r: usize, c: usize) -> [bool; 8] {
    let mut p = [false; 8];
    for (k, &(dr, dc)) in RING.iter().enumerate() {
        p[k] = mask.get_signed(r as isize + dr, c as isize + dc);
    }
    p
}

fn deletable(p: &[bool; 8], first: bool) -> bool {
    let b = p.iter().filter(|&&x| x).count();
    if !(2..=6).contains(&b) {
        return false;
    }
    let a = (0..8).filter(|&k| !p[k] && p[(k + 1) % 8]).count();
    if a != 1 {
        return false;
    }
    let [p2, _p3, p4, _p5, p6, _p7, p8, _p9] = *p;
    if first {
        !(p2 && p4 && p6) && !(p4 && p6 && p8)
    } else {
        !(p2 && p4 && p8) && !(p2 && p6 && p8)
    }
}

/// Thins `mask` to a one-pixel-wide skeleton.
pub fn skeletonize(mask: &BinaryMask) -> BinaryMask {
    let mut img = mask.clone();
    let mut active: Vec<(usize, usize)> = img.pixels().collect();
    loop {
        let mut changed = false;
        for first in [true, false] {
            let mut marked: Vec<(usize, usize)> = active
                .iter()
                .copied()
                .filter(|&(r, c)| deletable(&ring(&img, r, c), first))
                .collect();
            if marked.is_empty() {
                continue;
            }
            spare_vanishing_components(&img, &mut marked);
            if marked.is_empty() {
                continue;
            }
            for &(r, c) in &marked {
                img.set(r, c, false);
            }
            active.retain(|&(r, c)| img.get(r, c));
            changed = true;
        }
        if !changed {
            return img;
        }
    }
}

/// Removes from `marked` the smallest pixel of every component whose pixels
/// are all marked. `marked` is in row-major order.
fn spare_vanishing_components(img: &BinaryMask, marked: &mut Vec<(usize, usize)>) {
    let (w, h) = img.dims();
    let mut is_marked = vec![false; w * h];
    for &(r, c) in marked.iter() {
        is_marked[r * w + c] = true;
    }
    let mut seen = vec![false; w * h];
    let mut spared = Vec::new();
    let mut stack = Vec::new();
    for &(r0, c0) in marked.iter() {
        if seen[r0 * w + c0] {
            continue;
        }
        // Flood the component containing this marked pixel.
        let mut all_marked = true;
        seen[r0 * w + c0] = true;
        stack.push((r0, c0));
        while let Some((r, c)) = stack.pop() {
            all_marked &= is_marked[r * w + c];
            for &(dr, dc) in &RING {
                let (nr, nc) = (r as isize + dr, c as isize + dc);
                if img.get_signed(nr, nc) {
                    let i = nr as usize * w + nc as usize;
                    if !seen[i] {
                        seen[i] = true;
                        stack.push((nr as usize, nc as usize));
                    }
                }
            }
        }
        if all_marked {
            // Row-major iteration: (r0, c0) is the component's smallest pixel.
            spared.push((r0, c0));
        }
    }
    if !spared.is_empty() {
        marked.retain(|p| !spared.contains(p));
    }
}
