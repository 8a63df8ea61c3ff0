use rand::seq::index::sample;
use rand::Rng;
use serde_json::json;

use crate::error::Result;
use crate::funcf::FuncF;
use crate::greedy::IndexSet;
use crate::numeric::ls_slope;
use crate::oracle::{democracy_profile, estimate_constant, sampler::random_sign, ConstantName, Sampler};
use crate::report::CheckReport;
use crate::space::Space;
use crate::vector::{signed_ones, SparseVector};

use super::util::{horizon, lattice_spaces, le, rng, with_coefficients, SLACK};
use super::Params;

pub const VARIANTS_STATEMENT: &str = "for a quasi-greedy basis, f-disjoint democracy, f-democracy, f-disjoint superdemocracy, f-superdemocracy and Property (A, f) are equivalent, with constants related by the proof factors";
pub const REFORMULATION_STATEMENT: &str = "Property (A, f) with constant D holds if and only if ||x|| <= D ||x - P_A x + 1_{eps B}|| over the paired configurations";
pub const INTERLEAVED_STATEMENT: &str =
    "the interleaved l1/l2 basis is x^{1/2}-democratic but not democratic: equal-size ratios grow like m^{1/2}";
pub const TRANSFER_STATEMENT: &str =
    "if f >= c g then an f-democratic basis with constant D is g-democratic with constant max{2 c2^2 / c, ceil(2/c) D}";

fn structured(name: ConstantName, space: &Space, f: &FuncF, max_size: usize, horizon: usize, seed: u64) -> Result<f64> {
    Ok(estimate_constant(name, space, Some(f), &Sampler::FarBlock { max_size, horizon }, max_size, seed)?.observed)
}

/// `max_b φ_u(⌊f(b)⌋) / φ_l(b)` over the searched families, with or without signs.
fn overlapping(space: &Space, f: &FuncF, max_size: usize, horizon: usize, signed: bool, seed: u64) -> Result<f64> {
    let mut best: f64 = 0.0;
    for b in 1..=max_size {
        let a = f.at(b).floor() as usize;
        if a == 0 {
            continue;
        }
        let up = democracy_profile(space, a, horizon, signed, seed ^ a as u64)?;
        let low = democracy_profile(space, b, horizon, signed, seed ^ (b as u64) << 20)?;
        best = best.max(up.phi_upper / low.phi_lower);
    }
    Ok(best)
}

pub fn variants(params: &Params, seed: u64) -> Result<CheckReport> {
    let max_size = params.usize("max_size", 16, 64)?;
    let horizon = params.usize("horizon", 64, 256)?;
    let f = FuncF::sqrt();
    let mut report = CheckReport::new("", "");
    for (label, space) in [("direct_sum", Space::direct_sum(1.0, 2.0)?), ("schreier", Space::schreier(f.clone()))] {
        let d = structured(ConstantName::DeltaD, &space, &f, max_size, horizon, seed)?;
        let sd = structured(ConstantName::DeltaSd, &space, &f, max_size, horizon, seed)?;
        let pa = structured(ConstantName::DeltaA, &space, &f, max_size, horizon, seed)?;
        let dem = overlapping(&space, &f, max_size, horizon, false, seed)?;
        let sdem = overlapping(&space, &f, max_size, horizon, true, seed)?;
        // C_ell = C_q = 1 on both spaces
        let bands = [
            ("superdemocracy_vs_democracy", sd, 4.0 * d),
            ("democracy_vs_disjoint", dem, 1.0 + d),
            ("superdemocracy_overlapping", sdem, 4.0 * dem),
            ("property_a_vs_superdemocracy", pa, 1.0 + 2.0 * sd),
        ];
        report.measure(format!("{label}.Delta_d"), d);
        report.measure(format!("{label}.Delta_sd"), sd);
        report.measure(format!("{label}.Delta_A"), pa);
        report.measure(format!("{label}.Delta_democratic"), dem);
        report.measure(format!("{label}.Delta_superdemocratic"), sdem);
        for (band, lhs, rhs) in bands {
            if lhs > SLACK * rhs {
                report.fail(json!({ "space": space, "band": band, "measured": lhs, "bound": rhs, "seed": seed }));
            }
        }
    }
    Ok(report.report_only())
}

pub fn reformulation(params: &Params, seed: u64) -> Result<CheckReport> {
    let trials = params.usize("trials", 300, 3000)?;
    let f = FuncF::sqrt();
    let mut spaces = lattice_spaces();
    spaces.push(Space::kt());
    spaces.push(Space::weighted(1)?);
    let mut report = CheckReport::new("", "");
    let (mut count, mut violations) = (0usize, 0usize);
    let (mut d12, mut d33) = (0.0f64, 0.0f64);
    for (si, space) in spaces.iter().enumerate() {
        let mut r = rng(seed, si as u64);
        let h = horizon(space, 64);
        for _ in 0..trials {
            let a = r.gen_range(1..=3usize);
            let b = a * a + r.gen_range(0..3usize);
            let extra = r.gen_range(0..4usize);
            if a + b + extra > h {
                continue;
            }
            let picks: Vec<usize> = sample(&mut r, h, a + b + extra).into_iter().map(|i| i + 1).collect();
            let a_set: Vec<usize> = picks[..a].to_vec();
            let b_set: Vec<usize> = picks[a..a + b].to_vec();
            let mut x_support = a_set.clone();
            x_support.extend(&picks[a + b..]);
            let x = with_coefficients(&x_support, &mut r);
            debug_assert!((a as f64) <= f.at(b));
            let a_index: IndexSet = a_set.iter().copied().collect();
            let z = x.project_complement(&a_index);
            let eps: Vec<f64> = b_set.iter().map(|_| random_sign(&mut r)).collect();
            let zb = &z + &signed_ones(&b_set, &eps);
            let zb_norm = space.norm(&zb)?;
            let mut sup_a: f64 = 0.0;
            for mask in 0u32..(1 << a) {
                let delta: Vec<f64> = (0..a).map(|i| if mask & (1 << i) != 0 { -1.0 } else { 1.0 }).collect();
                sup_a = sup_a.max(space.norm(&(&z + &signed_ones(&a_set, &delta)))?);
            }
            let xn = space.norm(&x)?;
            count += 1;
            d12 = d12.max(xn / zb_norm);
            d33 = d33.max(sup_a / zb_norm);
            // the converse direction: y = z + 1_{eps A} turns one form into the other
            let y = &z + &signed_ones(&a_set, &vec![1.0; a]);
            let paired = &y.project_complement(&a_index) + &signed_ones(&b_set, &eps);
            if !le(xn, sup_a) || paired != zb {
                violations += 1;
                report.fail(json!({ "space": space, "x": x, "A": a_set, "B": b_set, "eps": eps }));
            }
        }
    }
    if d12 > d33 * (1.0 + 1e-12) {
        report.fail(json!({ "paired_forms": [d12, d33], "seed": seed }));
    }
    report.measure("configurations", count as f64);
    report.measure("violations", violations as f64);
    report.measure("Delta_paired_form", d12);
    report.measure("Delta_sign_form", d33);
    Ok(report)
}

pub fn interleaved(params: &Params, _seed: u64) -> Result<CheckReport> {
    let max_b = params.usize("max_size", 64, 256)?;
    let space = Space::direct_sum(1.0, 2.0)?;
    let mut report = CheckReport::new("", "");
    // The norm of 1_A depends only on how many odd and even indices A has,
    // so enumerating the splits covers every pair of sets.
    let set = |odd: usize, even: usize, offset: usize| -> SparseVector {
        let idx: Vec<usize> = (0..odd).map(|i| 2 * (offset + i) + 1).chain((0..even).map(|i| 2 * (offset + i) + 2)).collect();
        signed_ones(&idx, &vec![1.0; idx.len()])
    };
    let mut table = vec![vec![0.0; max_b + 1]; max_b + 1];
    for odd in 0..=max_b {
        for even in 0..=(max_b - odd) {
            let v = space.norm(&set(odd, even, 0))?;
            // translated copies must have the same norm
            if odd + even == max_b && space.norm(&set(odd, even, max_b))? != v {
                report.fail(json!({ "odd": odd, "even": even, "translation": max_b }));
            }
            table[odd][even] = v;
        }
    }
    let norm_of = |odd: usize, even: usize, _offset: usize| -> Result<f64> { Ok(table[odd][even]) };
    let mut worst = (0.0f64, 0usize, 0usize, 0usize, 0usize);
    let mut pairs = 0usize;
    for b in 1..=max_b {
        let a_max = (b as f64).sqrt().floor() as usize;
        for b1 in 0..=b {
            let nb = norm_of(b1, b - b1, max_b)?;
            for a in 1..=a_max {
                for a1 in 0..=a {
                    let r = norm_of(a1, a - a1, 0)? / nb;
                    pairs += 1;
                    if r > worst.0 {
                        worst = (r, a1, a - a1, b1, b - b1);
                    }
                }
            }
        }
    }
    report.measure("pairs", pairs as f64);
    report.measure("max_sqrt_ratio", worst.0);
    if worst.0 > 1.5 {
        report.fail(json!({ "odd_A": worst.1, "even_A": worst.2, "odd_B": worst.3, "even_B": worst.4, "ratio": worst.0 }));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut m = 2;
    while m <= max_b {
        let mut best: f64 = 0.0;
        for a1 in 0..=m {
            for b1 in 0..=m {
                best = best.max(norm_of(a1, m - a1, 0)? / norm_of(b1, m - b1, max_b)?);
            }
        }
        report.measure(format!("equal_size_ratio[m={m}]"), best);
        xs.push((m as f64).ln());
        ys.push(best.ln());
        if m == 64 && best < 6.0 {
            report.fail(json!({ "m": m, "equal_size_ratio": best }));
        }
        m *= 2;
    }
    let slope = ls_slope(&xs, &ys);
    report.measure("equal_size_slope", slope);
    if (slope - 0.5).abs() > 0.05 {
        report.fail(json!({ "equal_size_slope": slope, "expected": 0.5 }));
    }
    Ok(report)
}

pub fn transfer(params: &Params, seed: u64) -> Result<CheckReport> {
    let max_size = params.usize("max_size", 24, 64)?;
    let horizon = params.usize("horizon", 64, 256)?;
    let g = FuncF::sqrt();
    let c = 0.5;
    let f = FuncF::power(c, 0.5)?;
    let space = Space::schreier(g.clone());
    let df = structured(ConstantName::DeltaD, &space, &f, max_size, horizon, seed)?;
    let dg = structured(ConstantName::DeltaD, &space, &g, max_size, horizon, seed)?;
    let bound = (2.0 * space.c2().powi(2) / c).max((2.0 / c).ceil() * df.max(1.0));
    let mut report = CheckReport::new("", "");
    report.measure("c", c);
    report.measure("Delta_d_f", df);
    report.measure("Delta_d_g", dg);
    report.measure("transfer_bound", bound);
    report.measure("within_band", f64::from(u8::from(dg <= SLACK * bound)));
    Ok(report.report_only())
}
