//! Raster primitives: scalar grids, binary masks, label grids and the
//! operations shared by the loss, extraction and metric code.
//!
//! All rasters are row-major with row 0 at the top. Pixel `(x, y)` lives at
//! linear index `y * width + x`.

mod components;
mod edt;
mod morphology;

pub use components::connected_components;
pub use edt::{distance_transform, squared_distance_transform};
pub use morphology::dilate;

use crate::error::{Error, Result};

/// Pixel adjacency used for components and paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    #[default]
    Four,
    Eight,
}

impl Connectivity {
    pub(crate) fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::Four => &[(0, -1), (-1, 0), (1, 0), (0, 1)],
            Connectivity::Eight => &[
                (-1, -1),
                (0, -1),
                (1, -1),
                (-1, 0),
                (1, 0),
                (-1, 1),
                (0, 1),
                (1, 1),
            ],
        }
    }
}

fn check_len(width: usize, height: usize, len: usize) -> Result<()> {
    if width.checked_mul(height) != Some(len) {
        return Err(Error::DataLength { width, height, len });
    }
    Ok(())
}

/// Something with a pixel extent.
pub trait Extent {
    fn width(&self) -> usize;
    fn height(&self) -> usize;

    fn extent(&self) -> (usize, usize) {
        (self.width(), self.height())
    }

    fn len(&self) -> usize {
        self.width() * self.height()
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub(crate) fn ensure_same_extent(a: &impl Extent, b: &impl Extent) -> Result<()> {
    if a.extent() != b.extent() {
        return Err(Error::ExtentMismatch {
            left: a.extent(),
            right: b.extent(),
        });
    }
    Ok(())
}

macro_rules! impl_extent {
    ($t:ty) => {
        impl Extent for $t {
            fn width(&self) -> usize {
                self.width
            }
            fn height(&self) -> usize {
                self.height
            }
        }
    };
}

/// Single-precision raster: distance maps, predictions and gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

impl_extent!(ScalarGrid);

impl ScalarGrid {
    pub fn new(width: usize, height: usize, data: Vec<f32>) -> Result<Self> {
        check_len(width, height, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f32) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: f32) {
        self.data[y * self.width + x] = value;
    }

    /// First non-finite pixel, if any.
    pub fn find_non_finite(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|v| !v.is_finite())
            .map(|i| (i % self.width, i / self.width))
    }

    pub fn map(&self, f: impl Fn(f32) -> f32) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl_extent!(BinaryMask);

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        check_len(width, height, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![false; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.data[y * self.width + x] = value;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn not(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|b| !b).collect(),
        }
    }

    /// Iterator over `(x, y)` of true pixels in raster order.
    pub fn true_pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % w, i / w))
    }
}

/// Component labels: 0 is unlabeled, `1..=count` are components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelGrid {
    width: usize,
    height: usize,
    data: Vec<u32>,
    count: u32,
    connectivity: Connectivity,
}

impl_extent!(LabelGrid);

impl LabelGrid {
    pub(crate) fn from_parts(
        width: usize,
        height: usize,
        data: Vec<u32>,
        count: u32,
        connectivity: Connectivity,
    ) -> Self {
        Self {
            width,
            height,
            data,
            count,
            connectivity,
        }
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.data[y * self.width + x]
    }

    pub fn component_count(&self) -> u32 {
        self.count
    }

    pub fn connectivity(&self) -> Connectivity {
        self.connectivity
    }

    /// Mask of the labeled (non-zero) pixels.
    pub fn labeled(&self) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&l| l != 0).collect(),
        }
    }

    /// Pixel count of each component, indexed by `label - 1`.
    pub fn sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.count as usize];
        for &l in &self.data {
            if l > 0 {
                sizes[l as usize - 1] += 1;
            }
        }
        sizes
    }
}

/// Axis-aligned pixel window inside a parent grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WindowSpec {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
}

impl WindowSpec {
    pub fn full(width: usize, height: usize) -> Self {
        Self {
            x0: 0,
            y0: 0,
            w: width,
            h: height,
        }
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x0 + self.w && y >= self.y0 && y < self.y0 + self.h
    }

    fn check(&self, width: usize, height: usize) -> Result<()> {
        if self.x0 + self.w > width || self.y0 + self.h > height {
            return Err(Error::InvalidWindow {
                x0: self.x0,
                y0: self.y0,
                w: self.w,
                h: self.h,
                width,
                height,
            });
        }
        Ok(())
    }
}

/// Non-overlapping `win`x`win` tiles in raster order, clipped at the
/// right and bottom borders.
pub fn tile(width: usize, height: usize, win: usize) -> Vec<WindowSpec> {
    assert!(win >= 2, "window size must be at least 2");
    let mut out = Vec::with_capacity(width.div_ceil(win) * height.div_ceil(win));
    for y0 in (0..height).step_by(win) {
        for x0 in (0..width).step_by(win) {
            out.push(WindowSpec {
                x0,
                y0,
                w: win.min(width - x0),
                h: win.min(height - y0),
            });
        }
    }
    out
}

fn crop_vec<T: Copy>(data: &[T], width: usize, win: &WindowSpec) -> Vec<T> {
    let mut out = Vec::with_capacity(win.area());
    for y in win.y0..win.y0 + win.h {
        let row = y * width;
        out.extend_from_slice(&data[row + win.x0..row + win.x0 + win.w]);
    }
    out
}

/// Copy a window out of a raster.
pub trait Crop: Sized {
    fn crop(&self, win: &WindowSpec) -> Result<Self>;
}

impl Crop for ScalarGrid {
    fn crop(&self, win: &WindowSpec) -> Result<Self> {
        win.check(self.width, self.height)?;
        Ok(Self {
            width: win.w,
            height: win.h,
            data: crop_vec(&self.data, self.width, win),
        })
    }
}

impl Crop for BinaryMask {
    fn crop(&self, win: &WindowSpec) -> Result<Self> {
        win.check(self.width, self.height)?;
        Ok(Self {
            width: win.w,
            height: win.h,
            data: crop_vec(&self.data, self.width, win),
        })
    }
}

impl Crop for LabelGrid {
    /// Labels are recomputed inside the window, so a component cut by the
    /// window border may come back as several labels.
    fn crop(&self, win: &WindowSpec) -> Result<Self> {
        win.check(self.width, self.height)?;
        let mask = self.labeled().crop(win)?;
        Ok(connected_components(&mask, self.connectivity))
    }
}
