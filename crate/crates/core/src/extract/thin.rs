//! Zhang–Suen thinning.
//!
//! Each sub-iteration collects the usual candidates and then deletes them
//! in raster order, re-checking the crossing number and neighbor count
//! against the partially updated image. The re-check keeps two-pixel-thick
//! blobs (which plain Zhang–Suen erases entirely) from vanishing. A final
//! pass drops staircase corners so that the skeleton is 8-thin.

use crate::grid::{BinaryMask, Extent};

// Neighbor order P2..P9: N, NE, E, SE, S, SW, W, NW.
const RING: [(isize, isize); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

pub(crate) fn ring(data: &[bool], w: usize, h: usize, x: usize, y: usize) -> [bool; 8] {
    let mut out = [false; 8];
    for (k, &(dx, dy)) in RING.iter().enumerate() {
        let (nx, ny) = (x as isize + dx, y as isize + dy);
        if nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h {
            out[k] = data[ny as usize * w + nx as usize];
        }
    }
    out
}

fn transitions(p: &[bool; 8]) -> usize {
    (0..8).filter(|&k| !p[k] && p[(k + 1) % 8]).count()
}

fn count(p: &[bool; 8]) -> usize {
    p.iter().filter(|&&b| b).count()
}

fn candidate(p: &[bool; 8], first: bool) -> bool {
    let b = count(p);
    if !(3..=6).contains(&b) || transitions(p) != 1 {
        return false;
    }
    let [n, _, e, _, s, _, w, _] = *p;
    if first {
        !(n && e && s) && !(e && s && w)
    } else {
        !(n && e && w) && !(n && s && w)
    }
}

/// Thin a mask to a one-pixel-wide 8-connected skeleton.
pub fn thin(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = mask.extent();
    let mut data = mask.data().to_vec();
    let mut marked = Vec::new();
    loop {
        let mut changed = false;
        for first in [true, false] {
            marked.clear();
            for y in 0..h {
                for x in 0..w {
                    if data[y * w + x] && candidate(&ring(&data, w, h, x, y), first) {
                        marked.push((x, y));
                    }
                }
            }
            for &(x, y) in &marked {
                let p = ring(&data, w, h, x, y);
                if count(&p) >= 3 && transitions(&p) == 1 {
                    data[y * w + x] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    remove_staircases(&mut data, w, h);
    BinaryMask::new(w, h, data).expect("extent preserved")
}

// 8-connectivity number of the ring: 1 means removing the pixel changes
// neither the foreground nor the background topology.
fn connectivity_number(p: &[bool; 8]) -> usize {
    (0..8)
        .step_by(2)
        .filter(|&k| !p[k] && (p[(k + 1) % 8] || p[(k + 2) % 8]))
        .count()
}

// Exactly two neighbors, both 4-adjacent and perpendicular.
fn is_corner(p: &[bool; 8]) -> bool {
    let [n, _, e, _, s, _, w, _] = *p;
    count(p) == 2 && (n || s) && (e || w)
}

// Removes simple non-endpoint pixels left over by Zhang–Suen, such as
// staircase corners, so that the skeleton is 8-thin.
fn remove_staircases(data: &mut [bool], w: usize, h: usize) {
    loop {
        let mut changed = false;
        for y in 0..h {
            for x in 0..w {
                if !data[y * w + x] {
                    continue;
                }
                let p = ring(data, w, h, x, y);
                if connectivity_number(&p) == 1 && (count(&p) >= 3 || is_corner(&p)) {
                    data[y * w + x] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}
