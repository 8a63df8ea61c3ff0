//! `L^p`-normalized Haar systems on `[0,1]` and `[0,1]²`, evaluated exactly
//! as piecewise-constant functions on a dyadic grid.
//!
//! Enumeration (1-based): in one dimension index 1 is the constant function
//! and `h_{j,k}` (level `j ≥ 0`, position `0 ≤ k < 2^j`) has index
//! `2^j + k + 1`. Its values are `±2^{j/p}` on the two halves of
//! `[k 2^{-j}, (k+1) 2^{-j})`. In two dimensions the functions are tensor
//! products `h_a ⊗ h_b`, ordered by `max(depth(a), depth(b))` and then
//! lexicographically in `(a, b)`, where `depth` is the number of halvings a
//! 1-D function needs (0 for the constant, `j + 1` for `h_{j,k}`).

use crate::error::{Error, Result};
use crate::numeric::{abs_pow, KahanSum};

pub const MAX_RESOLUTION_1D: u32 = 24;
pub const MAX_RESOLUTION_2D: u32 = 10;

/// Number of halvings needed to resolve 1-D Haar function `n`.
pub fn depth_1d(n: usize) -> u32 {
    assert!(n >= 1);
    if n == 1 {
        0
    } else {
        (usize::BITS - 1 - (n - 1).leading_zeros()) + 1
    }
}

/// `(level j, position k)` of an oscillating 1-D index `n ≥ 2`.
fn level_position(n: usize) -> (u32, usize) {
    let j = depth_1d(n) - 1;
    (j, n - 1 - (1usize << j))
}

/// Cell-value table of one Haar function on a `2^resolution` (per axis) grid.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarTable {
    pub d: u32,
    pub resolution: u32,
    /// Row-major: `values[y * 2^resolution + x]` for `d = 2`.
    pub values: Vec<f64>,
}

impl HaarTable {
    pub fn cells_per_axis(&self) -> usize {
        1 << self.resolution
    }

    /// `∫ |h|^p`
    pub fn integral_abs_pow(&self, p: f64) -> f64 {
        let vol = (self.cells_per_axis() as f64).powi(self.d as i32).recip();
        let mut acc = KahanSum::new();
        for &v in &self.values {
            acc.add(abs_pow(v, p));
        }
        acc.value() * vol
    }
}

#[derive(Clone, Debug)]
pub struct HaarSystem {
    p: f64,
    d: u32,
    resolution: u32,
    /// 2-D enumeration table `(a, b)`; empty for `d = 1`.
    pairs: Vec<(u32, u32)>,
}

impl PartialEq for HaarSystem {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.d == other.d && self.resolution == other.resolution
    }
}

impl HaarSystem {
    pub fn new(p: f64, d: u32, resolution: u32) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::Config(format!("Haar system needs 1 < p < inf, got {p}")));
        }
        let pairs = match d {
            1 => {
                if resolution > MAX_RESOLUTION_1D {
                    return Err(Error::Resolution(format!("1-D resolution {resolution} > {MAX_RESOLUTION_1D}")));
                }
                Vec::new()
            }
            2 => {
                if resolution > MAX_RESOLUTION_2D {
                    return Err(Error::Resolution(format!("2-D resolution {resolution} > {MAX_RESOLUTION_2D}")));
                }
                enumerate_pairs(resolution)
            }
            _ => return Err(Error::Config(format!("Haar dimension must be 1 or 2, got {d}"))),
        };
        Ok(HaarSystem { p, d, resolution, pairs })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    /// Number of functions resolvable at this resolution.
    pub fn len(&self) -> usize {
        match self.d {
            1 => 1 << self.resolution,
            _ => self.pairs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The 1-D factors of 2-D index `n`.
    pub fn factors(&self, n: usize) -> Result<(usize, usize)> {
        self.check(n)?;
        let (a, b) = self.pairs[n - 1];
        Ok((a as usize, b as usize))
    }

    /// Inverse of [`HaarSystem::factors`].
    pub fn index_of(&self, a: usize, b: usize) -> Option<usize> {
        self.pairs.iter().position(|&(x, y)| x as usize == a && y as usize == b).map(|i| i + 1)
    }

    /// Index of the 1-D function `h_{j,k}`.
    pub fn index_1d(level: u32, position: usize) -> usize {
        (1usize << level) + position + 1
    }

    fn check(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.len() {
            return Err(Error::Resolution(format!(
                "Haar index {n} is not resolvable at resolution {} (d = {}, {} functions)",
                self.resolution,
                self.d,
                self.len()
            )));
        }
        Ok(())
    }

    /// Depth per axis needed to represent function `n`.
    fn depths(&self, n: usize) -> (u32, u32) {
        match self.d {
            1 => (depth_1d(n), 0),
            _ => {
                let (a, b) = self.pairs[n - 1];
                (depth_1d(a as usize), depth_1d(b as usize))
            }
        }
    }

    /// Cell-value table of function `n` at the system resolution.
    pub fn table(&self, n: usize) -> Result<HaarTable> {
        self.check(n)?;
        let cells = 1usize << self.resolution;
        let values = match self.d {
            1 => (0..cells).map(|c| value_1d(n, self.p, self.resolution, c)).collect(),
            _ => {
                let (a, b) = self.pairs[n - 1];
                let mut v = vec![0.0; cells * cells];
                for y in 0..cells {
                    let vy = value_1d(b as usize, self.p, self.resolution, y);
                    if vy == 0.0 {
                        continue;
                    }
                    for x in 0..cells {
                        v[y * cells + x] = value_1d(a as usize, self.p, self.resolution, x) * vy;
                    }
                }
                v
            }
        };
        Ok(HaarTable { d: self.d, resolution: self.resolution, values })
    }

    /// `‖Σ c_n h_n‖_{L^p}`, integrated exactly on the coarsest grid that
    /// resolves every function in the support.
    pub fn norm(&self, entries: &[(usize, f64)]) -> Result<f64> {
        let mut rx = 0;
        let mut ry = 0;
        for &(n, v) in entries {
            self.check(n)?;
            if v != 0.0 {
                let (dx, dy) = self.depths(n);
                rx = rx.max(dx);
                ry = ry.max(dy);
            }
        }
        let (nx, ny) = (1usize << rx, 1usize << ry);
        let mut grid = vec![0.0; nx * ny];
        for &(n, v) in entries {
            if v == 0.0 {
                continue;
            }
            match self.d {
                1 => add_1d(&mut grid, n, v, self.p, rx),
                _ => {
                    let (a, b) = self.pairs[n - 1];
                    let mut col = vec![0.0; ny];
                    add_1d(&mut col, b as usize, 1.0, self.p, ry);
                    let mut row = vec![0.0; nx];
                    add_1d(&mut row, a as usize, v, self.p, rx);
                    for (y, &cy) in col.iter().enumerate() {
                        if cy == 0.0 {
                            continue;
                        }
                        let line = &mut grid[y * nx..(y + 1) * nx];
                        for (g, &cx) in line.iter_mut().zip(&row) {
                            *g += cx * cy;
                        }
                    }
                }
            }
        }
        let mut acc = KahanSum::new();
        for &g in &grid {
            acc.add(abs_pow(g, self.p));
        }
        Ok((acc.value() / (nx * ny) as f64).powf(1.0 / self.p))
    }
}

/// Value of 1-D function `n` on cell `c` of a `2^resolution` grid.
fn value_1d(n: usize, p: f64, resolution: u32, c: usize) -> f64 {
    if n == 1 {
        return 1.0;
    }
    let (j, k) = level_position(n);
    let width = 1usize << (resolution - j);
    let start = k * width;
    if c < start || c >= start + width {
        0.0
    } else if c < start + width / 2 {
        2f64.powf(j as f64 / p)
    } else {
        -(2f64.powf(j as f64 / p))
    }
}

/// Adds `v · h_n` onto a `2^resolution` grid, touching only the support.
fn add_1d(grid: &mut [f64], n: usize, v: f64, p: f64, resolution: u32) {
    if n == 1 {
        grid.iter_mut().for_each(|g| *g += v);
        return;
    }
    let (j, k) = level_position(n);
    let amp = v * 2f64.powf(j as f64 / p);
    let width = 1usize << (resolution - j);
    let start = k * width;
    for g in &mut grid[start..start + width / 2] {
        *g += amp;
    }
    for g in &mut grid[start + width / 2..start + width] {
        *g -= amp;
    }
}

fn enumerate_pairs(resolution: u32) -> Vec<(u32, u32)> {
    let count = 1u32 << resolution;
    let mut pairs = Vec::with_capacity((count as usize) * (count as usize));
    for level in 0..=resolution {
        for a in 1..=count {
            for b in 1..=count {
                if depth_1d(a as usize).max(depth_1d(b as usize)) == level {
                    pairs.push((a, b));
                }
            }
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_first() {
        let h = HaarSystem::new(2.0, 1, 4).unwrap();
        let t = h.table(1).unwrap();
        assert!(t.values.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn first_oscillating_l2() {
        let h = HaarSystem::new(2.0, 1, 1).unwrap();
        let t = h.table(2).unwrap();
        assert_eq!(t.values, vec![1.0, -1.0]);
        assert!((t.integral_abs_pow(2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tensor_level_one_zero_p4() {
        // h_{0,0} ⊗ constant: values ±1 on left/right halves.
        let h = HaarSystem::new(4.0, 2, 3).unwrap();
        let n = h.index_of(2, 1).unwrap();
        let t = h.table(n).unwrap();
        assert!((t.integral_abs_pow(4.0) - 1.0).abs() < 1e-14);
        // level 1 in the first axis, constant in the second
        let n = h.index_of(HaarSystem::index_1d(1, 0), 1).unwrap();
        assert!((h.table(n).unwrap().integral_abs_pow(4.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn every_function_normalized() {
        for &(p, d, r) in &[(3.0, 1, 5), (4.0, 2, 3), (1.5, 2, 2)] {
            let h = HaarSystem::new(p, d, r).unwrap();
            for n in 1..=h.len() {
                let t = h.table(n).unwrap();
                assert!((t.integral_abs_pow(p) - 1.0).abs() < 1e-12, "p={p} d={d} n={n}");
                assert!((h.norm(&[(n, 1.0)]).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn enumeration_order_2d() {
        let h = HaarSystem::new(2.0, 2, 2).unwrap();
        assert_eq!(h.len(), 16);
        assert_eq!(h.factors(1).unwrap(), (1, 1));
        assert_eq!(h.factors(2).unwrap(), (1, 2));
        assert_eq!(h.factors(3).unwrap(), (2, 1));
        assert_eq!(h.factors(4).unwrap(), (2, 2));
    }

    #[test]
    fn out_of_resolution() {
        let h = HaarSystem::new(2.0, 1, 3).unwrap();
        assert!(matches!(h.table(9), Err(Error::Resolution(_))));
        assert!(matches!(h.norm(&[(9, 1.0)]), Err(Error::Resolution(_))));
        assert!(HaarSystem::new(1.0, 1, 3).is_err());
        assert!(HaarSystem::new(2.0, 3, 3).is_err());
    }

    #[test]
    fn norm_matches_table_integration() {
        let h = HaarSystem::new(3.0, 2, 3).unwrap();
        let entries = [(1, 0.5), (5, -1.0), (17, 2.0), (40, 0.25)];
        let cells = 1 << h.resolution();
        let mut grid = vec![0.0; cells * cells];
        for &(n, c) in &entries {
            for (g, v) in grid.iter_mut().zip(h.table(n).unwrap().values) {
                *g += c * v;
            }
        }
        let direct = (grid.iter().map(|g: &f64| g.abs().powi(3)).sum::<f64>() / grid.len() as f64).cbrt();
        assert!((h.norm(&entries).unwrap() - direct).abs() < 1e-12);
    }
}
