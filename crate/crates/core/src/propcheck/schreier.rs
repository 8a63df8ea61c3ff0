use rand::Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::funcf::FuncF;
use crate::oracle::{estimate_constant, far_block_start, sampler::random_sign, ConstantName, Sampler};
use crate::report::CheckReport;
use crate::space::{schreier, Space};
use crate::vector::{signed_ones, SparseVector};

use super::util::{le, rng, SLACK};
use super::Params;

pub const SANDWICH_STATEMENT: &str = "in the Schreier-type space X_f, f(N)/2 - 1 <= ||1_[1,N]|| <= f(N)/f(1) for every N";
pub const SEPARATION_STATEMENT: &str = "there is a 1-unconditional basis that is g-greedy but not f-almost greedy when sup f/g is infinite: far blocks of size floor(f(m)) against prefixes of length m in X_g";
pub const COMPARISON_STATEMENT: &str = "for X_g: sup f/g finite gives f-democracy, sup f/g infinite gives ratios at least f(1) floor(f(m)) / g(m), and bounded g gives ||1_{eps A}|| <= sup g / g(1)";
pub const BOUNDED_STATEMENT: &str = "for bounded g, a basis is g-almost greedy if and only if it is quasi-greedy";

fn prefix(n: usize) -> SparseVector {
    let idx: Vec<usize> = (1..=n).collect();
    signed_ones(&idx, &vec![1.0; n])
}

fn block(start: usize, len: usize) -> SparseVector {
    let idx: Vec<usize> = (start..start + len).collect();
    signed_ones(&idx, &vec![1.0; len])
}

pub fn sandwich(params: &Params, seed: u64) -> Result<CheckReport> {
    let max_n = params.usize("max_n", 2000, 5000)?;
    let vectors = params.usize("vectors", 1000, 5000)?;
    let max_support = params.usize("max_support", 16, 18)?;
    let funcs = params.funcs(
        "funcs",
        vec![FuncF::sqrt(), FuncF::power(1.0, 0.9)?, FuncF::compose(&FuncF::sqrt(), &FuncF::sqrt())],
    )?;
    let mut report = CheckReport::new("", "");
    for f in &funcs {
        let space = Space::schreier(f.clone());
        let (mut low_gap, mut high_gap) = (f64::INFINITY, f64::INFINITY);
        for n in 1..=max_n {
            let v = space.norm(&prefix(n))?;
            let lower = 0.5 * f.at(n) - 1.0;
            let upper = f.at(n) / f.at(1);
            low_gap = low_gap.min(v - lower);
            high_gap = high_gap.min(upper - v);
            if !le(lower, v) || !le(v, upper) {
                report.fail(json!({ "func": f, "N": n, "norm": v, "bounds": [lower, upper] }));
            }
        }
        report.measure(format!("min_gap_lower[{}]", f.label()), low_gap);
        report.measure(format!("min_gap_upper[{}]", f.label()), high_gap);
    }

    // fast evaluator against the admissible-set enumeration
    let f = FuncF::sqrt();
    let mut r = rng(seed, 1);
    let (mut exact_dyadic, mut max_rel) = (0usize, 0.0f64);
    for t in 0..vectors {
        let s = r.gen_range(1..=max_support);
        let x = if t % 2 == 0 {
            let positions = crate::oracle::sampler::random_set(&mut r, 64, s);
            let pairs: Vec<(usize, f64)> =
                positions.into_iter().map(|n| (n, r.gen_range(1..=16) as f64 / 8.0 * random_sign(&mut r))).collect();
            SparseVector::from_pairs(pairs)?
        } else {
            Sampler::Gaussian { support: s, horizon: 64 }.draw_vector(&mut r)?
        };
        let entries = x.pairs();
        let fast = schreier::norm(&f, &entries);
        let slow = schreier::norm_by_enumeration(&f, &entries)?;
        if t % 2 == 0 {
            // dyadic coefficients: both sums are exact
            if fast != slow {
                report.fail(json!({ "x": x, "fast": fast, "enumerated": slow }));
            } else {
                exact_dyadic += 1;
            }
        } else {
            let rel = (fast - slow).abs() / slow;
            max_rel = max_rel.max(rel);
            if rel > 1e-12 {
                report.fail(json!({ "x": x, "fast": fast, "enumerated": slow }));
            }
        }
    }
    report.measure("enumeration_vectors", vectors as f64);
    report.measure("dyadic_exact_matches", exact_dyadic as f64);
    report.measure("gaussian_max_rel_diff", max_rel);
    Ok(report)
}

/// `‖1_A‖ / ‖1_B‖` for a far block `A` of size `⌊f(m)⌋` and the prefix `B` of length `m` in `X_g`.
fn far_ratio(space: &Space, f: &FuncF, m: usize) -> Result<(f64, usize, usize, f64)> {
    let a = f.at(m).floor() as usize;
    let start = far_block_start(space, a).ok_or_else(|| Error::Precondition(format!("no admissible block of size {a}")))?;
    let na = space.norm(&block(start, a))?;
    let nb = space.norm(&prefix(m))?;
    Ok((na / nb, a, start, na))
}

pub fn separation(params: &Params, seed: u64) -> Result<CheckReport> {
    let ms = params.usizes("m", &[16, 64, 256, 1024], &[16, 64, 256, 1024, 4096])?;
    let max_size = params.usize("max_size", 64, 128)?;
    let g = FuncF::sqrt();
    let f = FuncF::power(1.0, 0.9)?;
    let space = Space::schreier(g.clone());
    let mut report = CheckReport::new("", "");
    let mut prev = 0.0;
    for &m in &ms {
        let (ratio, a, start, na) = far_ratio(&space, &f, m)?;
        let curve = 0.5 * (m as f64).powf(0.4);
        let exact_curve = f.at(1) * a as f64 / (g.at(m) / g.at(1));
        report.measure(format!("ratio[m={m}]"), ratio);
        report.measure(format!("curve[m={m}]"), curve);
        if na != a as f64 || ratio < curve || !le(exact_curve, ratio) || ratio < prev {
            report.fail(json!({ "m": m, "block_start": start, "block_size": a, "ratio": ratio, "curve": curve, "previous": prev }));
        }
        prev = ratio;
    }
    // g-greedy side: the same space is g-democratic with constant at most 4
    let est = estimate_constant(ConstantName::DeltaD, &space, Some(&g), &Sampler::FarBlock { max_size, horizon: 256 }, max_size, seed)?;
    report.measure("Delta_d_g", est.observed);
    if est.observed > 4.0 {
        report.fail(json!({ "Delta_d_g": est.observed, "witness": est.witness, "seed": seed }));
    }
    Ok(report)
}

pub fn comparison(params: &Params, seed: u64) -> Result<CheckReport> {
    let max_size = params.usize("max_size", 48, 128)?;
    let trials = params.usize("trials", 500, 5000)?;
    let g = FuncF::sqrt();
    let space = Space::schreier(g.clone());
    let mut report = CheckReport::new("", "");

    // i) f <= g, so |A| <= g(|B|) and ||1_A|| <= 2(||1_B|| + 1) <= 4 ||1_B||
    let f_small = FuncF::compose(&FuncF::power(1.0, 0.9)?, &g);
    let est = estimate_constant(
        ConstantName::DeltaD,
        &space,
        Some(&f_small),
        &Sampler::FarBlock { max_size, horizon: 256 },
        max_size,
        seed,
    )?;
    report.measure("dominated.Delta_d", est.observed);
    if est.observed > 4.0 {
        report.fail(json!({ "part": "dominated", "Delta_d": est.observed, "witness": est.witness }));
    }

    // ii) f/g unbounded: ratios stay above f(1) floor(f(m)) / g(m)
    let f_big = FuncF::power(1.0, 0.7)?;
    for m in [4usize, 16, 64, 256, 1024] {
        let (ratio, a, _, _) = far_ratio(&space, &f_big, m)?;
        let curve = f_big.at(1) * a as f64 / g.at(m);
        report.measure(format!("dominating.ratio[m={m}]"), ratio);
        if !le(curve, ratio) {
            report.fail(json!({ "part": "dominating", "m": m, "ratio": ratio, "curve": curve }));
        }
    }

    // iii) bounded g: every signed indicator has norm between 1 and sup g / g(1)
    let c = 2.0;
    let bounded = FuncF::bounded(c)?;
    let xb = Space::schreier(bounded.clone());
    let cap = c / bounded.at(1);
    let mut r = rng(seed, 3);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let size = r.gen_range(1..=24usize);
        let set = crate::oracle::sampler::random_set(&mut r, 400, size);
        let eps: Vec<f64> = set.iter().map(|_| random_sign(&mut r)).collect();
        let v = xb.norm(&signed_ones(&set, &eps))?;
        worst = worst.max(v);
        if !le(v, cap) || v < 1.0 {
            report.fail(json!({ "part": "bounded", "set": set, "eps": eps, "norm": v, "cap": cap }));
        }
    }
    report.measure("bounded.max_norm", worst);
    report.measure("bounded.cap", cap);
    Ok(report)
}

pub fn bounded_f(params: &Params, seed: u64) -> Result<CheckReport> {
    let trials = params.usize("trials", 32, 128)?;
    let c = 2.0;
    let g = FuncF::bounded(c)?;
    let l2 = Space::lp(2.0)?;
    // C_ell + Delta_sd (C_ell + 1) with C_ell = 1 and Delta_sd <= sup g * c2^2
    let bound = 1.0 + c * l2.c2().powi(2) * 2.0;
    let sampler = Sampler::Gaussian { support: 8, horizon: 24 };
    let est = estimate_constant(ConstantName::CAf, &l2, Some(&g), &sampler, trials, seed)?;
    let mut report = CheckReport::new("", "");
    report.measure("l2.C_af", est.observed);
    report.measure("band", SLACK * bound);
    if est.observed > SLACK * bound {
        report.fail(json!({ "C_af": est.observed, "witness": est.witness, "seed": seed }));
    }
    let kt = estimate_constant(ConstantName::CAf, &Space::kt(), Some(&g), &sampler, trials, seed)?;
    report.measure("kt.C_af", kt.observed);
    Ok(report)
}
