use std::collections::VecDeque;

use super::{BinaryMask, Connectivity, Extent, LabelGrid};

/// Label the connected components of the true pixels.
///
/// Labels follow raster order of each component's first pixel, so the
/// component holding the smallest `(y, x)` gets label 1.
pub fn connected_components(mask: &BinaryMask, connectivity: Connectivity) -> LabelGrid {
    let (w, h) = mask.extent();
    let src = mask.data();
    let mut labels = vec![0u32; w * h];
    let mut next = 0u32;
    let mut queue = VecDeque::new();

    for start in 0..w * h {
        if !src[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            for &(dx, dy) in connectivity.offsets() {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if src[j] && labels[j] == 0 {
                    labels[j] = next;
                    queue.push_back(j);
                }
            }
        }
    }
    LabelGrid::from_parts(w, h, labels, next, connectivity)
}
