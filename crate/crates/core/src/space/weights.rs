//! Weight sequence of the weighted summing space.
//!
//! `t_n = 1/√n`, `L_n = e^{(ln n)²}`, `a_n = 1/(√n ln(n+1))`. With `N_0 = 0`,
//! `N_1 > 10` is the least integer with `b_1 = a_1 t_1 / Σ_{n≤N_1} t_n < a_1/L_1`,
//! and `N_{j+1}` is the least integer with `N_{j+1} > 10 N_j` and
//! `b_{j+1} = a_{j+1} t_{j+1} / Σ_{n=N_j+1}^{N_j+N_{j+1}} t_n < min(a_{j+1}/L_{j+1}, b_j)`.
//! Block `B_j` is `(t_{N_{j-1}+1}, …, t_{N_{j-1}+N_j})` and the weights are
//! `(t_1, B_1, t_2, B_2, …)`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::numeric::{format_significant, KahanSum};
use crate::schema::{csv_preamble, WEIGHT_COLUMNS};

/// Longest flattened weight sequence we are willing to build.
pub const MAX_WEIGHTS: usize = 1 << 26;

pub fn t(n: usize) -> f64 {
    1.0 / (n as f64).sqrt()
}

pub fn big_l(n: usize) -> f64 {
    let l = (n as f64).ln();
    (l * l).exp()
}

pub fn a(n: usize) -> f64 {
    1.0 / ((n as f64).sqrt() * ((n + 1) as f64).ln())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    /// `N_j`
    pub len: usize,
    /// `b_j`
    pub b: f64,
    /// `N_{j-1}`: block `j` holds `t_{start+1}, …, t_{start+len}`.
    pub start: usize,
    /// Flattened position of `t_j`; the block follows at `offset + 1`.
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightSequence {
    j_max: usize,
    blocks: Vec<Block>,
    len: usize,
}

impl WeightSequence {
    pub fn new(j_max: usize) -> Result<Self> {
        if j_max == 0 {
            return Err(Error::Config("j_max must be at least 1".into()));
        }
        let mut blocks: Vec<Block> = Vec::with_capacity(j_max);
        let mut len = 0usize;
        let mut prev_n = 0usize;
        let mut prev_b = f64::INFINITY;
        for j in 1..=j_max {
            let bound = (a(j) / big_l(j)).min(prev_b);
            let numerator = a(j) * t(j);
            // N_j > 10 N_{j-1}; for j = 1 the bound is the literal N_1 > 10.
            let min_n = if j == 1 { 11 } else { 10 * prev_n + 1 };
            let mut sum = KahanSum::new();
            let mut n = 0usize;
            let b = loop {
                n += 1;
                if len + 1 + n > MAX_WEIGHTS {
                    return Err(Error::Capacity(format!(
                        "block {j} needs more than {MAX_WEIGHTS} flattened weights; lower j_max"
                    )));
                }
                sum.add(t(prev_n + n));
                if n >= min_n {
                    let b = numerator / sum.value();
                    if b < bound {
                        break b;
                    }
                }
            };
            blocks.push(Block { len: n, b, start: prev_n, offset: len + 1 });
            len += 1 + n;
            prev_n = n;
            prev_b = b;
        }
        Ok(WeightSequence { j_max, blocks, len })
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// `N_j` for `j = 1..=j_max`.
    pub fn block_lengths(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len).collect()
    }

    /// Number of flattened weights `M`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `w_n` for `1 ≤ n ≤ M`.
    pub fn weight(&self, n: usize) -> Result<f64> {
        if n == 0 || n > self.len {
            return Err(Error::IndexOutOfRange { index: n, capacity: self.len });
        }
        let j = self.blocks.partition_point(|b| b.offset <= n) - 1;
        let block = &self.blocks[j];
        if n == block.offset {
            Ok(t(j + 1))
        } else {
            Ok(t(block.start + (n - block.offset)))
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len);
        for (j, block) in self.blocks.iter().enumerate() {
            out.push(t(j + 1));
            out.extend((1..=block.len).map(|i| t(block.start + i)));
        }
        out
    }

    /// Flattened positions of the block entries of `B_j` (1-based `j`).
    pub fn block_positions(&self, j: usize) -> std::ops::RangeInclusive<usize> {
        let b = &self.blocks[j - 1];
        b.offset + 1..=b.offset + b.len
    }

    /// Checks the defining conditions post hoc, returning one message per violation.
    pub fn verify(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let mut prev: Option<&Block> = None;
        for (i, block) in self.blocks.iter().enumerate() {
            let j = i + 1;
            let bound = a(j) / big_l(j);
            if !(block.b < bound) {
                problems.push(format!("b_{j} = {} is not below a_{j}/L_{j} = {bound}", block.b));
            }
            match prev {
                None if block.len <= 10 => problems.push(format!("N_1 = {} is not > 10", block.len)),
                Some(p) => {
                    if block.len <= 10 * p.len {
                        problems.push(format!("N_{j}/N_{} = {}/{} is not > 10", j - 1, block.len, p.len));
                    }
                    if !(block.b < p.b) {
                        problems.push(format!("b_{j} = {} is not below b_{} = {}", block.b, j - 1, p.b));
                    }
                }
                None => {}
            }
            prev = Some(block);
        }
        problems
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(csv_preamble().as_bytes())?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(WEIGHT_COLUMNS)?;
        for (i, v) in self.weights().into_iter().enumerate() {
            w.write_record([(i + 1).to_string(), format_significant(v, 17)])?;
        }
        w.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_block() {
        let w = WeightSequence::new(1).unwrap();
        assert_eq!(w.block_lengths(), vec![11]);
        assert_eq!(w.weight(1).unwrap(), 1.0);
        assert_eq!(w.len(), 12);
        assert!(w.verify().is_empty());
    }

    #[test]
    fn two_blocks() {
        let w = WeightSequence::new(2).unwrap();
        let n = w.block_lengths();
        assert_eq!(n, vec![11, 111]);
        assert_eq!(w.len(), 124);
        assert!(w.verify().is_empty());
        let flat = w.weights();
        assert_eq!(flat.len(), w.len());
        for (i, &v) in flat.iter().enumerate() {
            assert_eq!(w.weight(i + 1).unwrap(), v);
        }
        // t_2 sits right after B_1; B_2 starts at t_{N_1 + 1} = t_12.
        assert_eq!(flat[12], t(2));
        assert_eq!(flat[13], t(12));
        assert!(w.weight(125).is_err());
    }

    #[test]
    fn capacity() {
        assert!(matches!(WeightSequence::new(12), Err(Error::Capacity(_))));
    }

    #[test]
    fn csv_export() {
        let w = WeightSequence::new(1).unwrap();
        let mut buf = Vec::new();
        w.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("# schema: tgalab/1"));
        assert_eq!(lines.next(), Some("n,w_n"));
        assert_eq!(lines.next(), Some("1,1"));
        assert_eq!(s.lines().count(), 14);
    }
}
