use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::json;

use crate::error::Result;
use crate::funcf::FuncF;
use crate::greedy::{f_greedy_by_definition, f_greedy_by_subset, greedy_set, greedy_sets, is_f_greedy_set, IndexSet, TiePolicy};
use crate::oracle::sampler::random_sign;
use crate::oracle::{estimate_constant, ConstantName, Sampler};
use crate::report::CheckReport;
use crate::space::Space;
use crate::vector::{signed_ones, SparseVector};

use super::util::{le, rng, standard_funcs, with_coefficients, SLACK};
use super::Params;

pub const CRITERIA_STATEMENT: &str = "A is an f-greedy set of x if and only if A contains a greedy set of x of size at least |A| - f(|A|)";
pub const NESTING_STATEMENT: &str = "every greedy set of order m is an f-greedy set";
pub const CHARACTERIZATION_STATEMENT: &str = "a basis is f-unconditional if and only if it is quasi-greedy and has Property (f), with constants K_u <= C_q + C and C <= 2 K_u for the projection constant C over f-sized sets beside a greedy set";
pub const RELATIONS_STATEMENT: &str = "C_ell <= C_af <= C_gf on shared configurations, C_af <= C_ell Delta_A and C_gf <= Delta_A (K_su^2 + 2 K_su)";
pub const EQUIVALENCE_STATEMENT: &str =
    "for non-identity f, f-almost greedy and f-greedy coincide; both constants stay bounded across dimensions";

/// Does some `E ⊆ A` with `|E| ≤ f(|A|)` leave `F = A \ E` dominating the outside?
fn brute_decomposition(moduli: &[f64], a_mask: u32, outside: f64, fa: f64) -> bool {
    let mut e = a_mask;
    loop {
        if (e.count_ones() as f64) <= fa {
            let f_mask = a_mask & !e;
            if (0..moduli.len()).filter(|i| f_mask & (1 << i) != 0).all(|i| moduli[i] >= outside) {
                return true;
            }
        }
        if e == 0 {
            return false;
        }
        e = (e - 1) & a_mask;
    }
}

/// Does some greedy `B ⊆ A` have `|B| ≥ |A| − f(|A|)`?
fn brute_greedy_subset(moduli: &[f64], all: u32, a_mask: u32, fa: f64) -> bool {
    let need = a_mask.count_ones() as f64 - fa;
    let mut b = a_mask;
    loop {
        if b.count_ones() as f64 >= need {
            let inside = (0..moduli.len()).filter(|i| b & (1 << i) != 0).map(|i| moduli[i]).fold(f64::INFINITY, f64::min);
            let rest = all & !b;
            let outside = (0..moduli.len()).filter(|i| rest & (1 << i) != 0).map(|i| moduli[i]).fold(0.0, f64::max);
            if inside >= outside {
                return true;
            }
        }
        if b == 0 {
            return false;
        }
        b = (b - 1) & a_mask;
    }
}

/// Nonzero coefficients with pairwise distinct moduli.
fn distinct_moduli(support: usize, horizon: usize, r: &mut rand_chacha::ChaCha8Rng) -> Result<SparseVector> {
    loop {
        let x = Sampler::Gaussian { support, horizon }.draw_vector(r)?;
        let mut m: Vec<f64> = x.iter().map(|(_, v)| v.abs()).collect();
        m.sort_by(f64::total_cmp);
        if m.windows(2).all(|w| w[0] < w[1]) {
            return Ok(x);
        }
    }
}

pub fn criteria(params: &Params, seed: u64) -> Result<CheckReport> {
    let vectors = params.usize("vectors", 200, 1000)?;
    let max_support = params.usize("max_support", 8, 9)?;
    let funcs = params.funcs("funcs", standard_funcs())?;
    let mut report = CheckReport::new("", "");
    let mut r = rng(seed, 0);
    let (mut instances, mut agree, mut yes) = (0usize, 0usize, 0usize);
    for _ in 0..vectors {
        let s = r.gen_range(1..=max_support);
        let x = distinct_moduli(s, 16, &mut r)?;
        // the support plus one zero coordinate, so padded sets are covered too
        let mut pool: Vec<usize> = x.support().collect();
        pool.push((1..).find(|&n| x.get(n) == 0.0).expect("finite support"));
        let moduli: Vec<f64> = pool.iter().map(|&n| x.get(n).abs()).collect();
        let all: u32 = (1 << pool.len()) - 1;
        for mask in 0..=all {
            let set: IndexSet = (0..pool.len()).filter(|i| mask & (1 << i) != 0).map(|i| pool[i]).collect();
            let outside = (0..pool.len()).filter(|i| mask & (1 << i) == 0).map(|i| moduli[i]).fold(0.0, f64::max);
            for f in &funcs {
                let fa = f.at(set.len());
                let answers = [
                    f_greedy_by_definition(&x, &set, f).is_yes(),
                    f_greedy_by_subset(&x, &set, f).is_yes(),
                    brute_decomposition(&moduli, mask, outside, fa),
                    brute_greedy_subset(&moduli, all, mask, fa),
                ];
                instances += 1;
                if answers.iter().all(|&a| a == answers[0]) {
                    agree += 1;
                    yes += usize::from(answers[0]);
                } else {
                    report.fail(json!({ "x": x, "set": set, "func": f, "answers": answers }));
                }
            }
        }
    }
    report.measure("instances", instances as f64);
    report.measure("agreement", agree as f64 / instances as f64);
    report.measure("accepted", yes as f64);
    Ok(report)
}

pub fn nesting(params: &Params, seed: u64) -> Result<CheckReport> {
    let vectors = params.usize("vectors", 150, 1000)?;
    let funcs = standard_funcs();
    let mut report = CheckReport::new("", "");
    let mut r = rng(seed, 0);
    let mut checked = 0usize;
    for t in 0..vectors {
        let support = r.gen_range(1..=8usize);
        let sampler = match t % 3 {
            0 => Sampler::SignComb { support, horizon: 10 },
            1 => Sampler::GeometricComb { support, horizon: 10, ratio: 0.5 },
            _ => Sampler::Gaussian { support, horizon: 10 },
        };
        let x = sampler.draw_vector(&mut r)?;
        let dim = 12;
        for m in 0..=(support + 2) {
            for set in greedy_sets(&x, m, TiePolicy::EnumerateAll, dim)? {
                for f in &funcs {
                    checked += 1;
                    let ok = matches!(is_f_greedy_set(&x, &set, f), Ok(v) if v.is_yes());
                    if !ok {
                        report.fail(json!({ "x": x, "m": m, "set": set, "func": f }));
                    }
                }
            }
        }
    }
    report.measure("greedy_set_checks", checked as f64);
    Ok(report)
}

fn estimate(name: ConstantName, space: &Space, f: &FuncF, sampler: &Sampler, trials: usize, seed: u64) -> Result<f64> {
    Ok(estimate_constant(name, space, Some(f), sampler, trials, seed)?.observed)
}

/// `max ‖P_A x‖/‖x‖` over `A` disjoint from a greedy set `B` with `|A| ≤ f(|A| + |B|)`.
fn projection_beside_greedy(space: &Space, f: &FuncF, trials: usize, seed: u64) -> Result<f64> {
    let mut r = rng(seed, 7);
    let mut best: f64 = 0.0;
    for _ in 0..trials {
        let s = r.gen_range(2..=8usize);
        let x = Sampler::Gaussian { support: s, horizon: 24 }.draw_vector(&mut r)?;
        let k = r.gen_range(0..=s);
        let b = greedy_set(&x, k, 24)?;
        let mut rest: Vec<usize> = (1..=24).filter(|n| !b.contains(n)).collect();
        rest.shuffle(&mut r);
        let a_max = (1..=rest.len()).take_while(|&a| a as f64 <= f.at(a + k)).last().unwrap_or(0);
        if a_max == 0 {
            continue;
        }
        let a: IndexSet = rest[..r.gen_range(1..=a_max)].iter().copied().collect();
        best = best.max(space.norm(&x.project(&a))? / space.norm(&x)?);
    }
    Ok(best)
}

/// Property (f) ratios `‖P_A x‖ / ‖x + 1_{εB}‖`.
fn property_f(space: &Space, f: &FuncF, trials: usize, seed: u64) -> Result<f64> {
    let mut r = rng(seed, 8);
    let mut best: f64 = 0.0;
    for _ in 0..trials {
        let s = r.gen_range(1..=6usize);
        let b = r.gen_range(0..=12usize);
        let picks: Vec<usize> = rand::seq::index::sample(&mut r, 32, s + b).into_iter().map(|i| i + 1).collect();
        let x = with_coefficients(&picks[..s], &mut r);
        let a_max = (1..=s).take_while(|&a| a as f64 <= f.at(a + b)).last().unwrap_or(0);
        if a_max == 0 {
            continue;
        }
        let a: IndexSet = picks[..r.gen_range(1..=a_max)].iter().copied().collect();
        let eps: Vec<f64> = (0..b).map(|_| random_sign(&mut r)).collect();
        let den = &x + &signed_ones(&picks[s..], &eps);
        best = best.max(space.norm(&x.project(&a))? / space.norm(&den)?);
    }
    Ok(best)
}

pub fn characterization(params: &Params, seed: u64) -> Result<CheckReport> {
    let trials = params.usize("trials", 48, 256)?;
    let f = FuncF::sqrt();
    let sampler = Sampler::Gaussian { support: 8, horizon: 24 };
    let mut report = CheckReport::new("", "");
    for (label, space) in [("l2", Space::lp(2.0)?), ("kt", Space::kt()), ("schreier", Space::schreier(FuncF::sqrt()))] {
        let ku = estimate(ConstantName::KU, &space, &f, &sampler, trials, seed)?;
        let cq = estimate(ConstantName::CQ, &space, &f, &sampler, trials, seed)?;
        let cl = estimate(ConstantName::CEll, &space, &f, &sampler, trials, seed)?;
        let c31 = projection_beside_greedy(&space, &f, trials * 4, seed)?;
        let pf = property_f(&space, &f, trials * 4, seed)?;
        report.measure(format!("{label}.K_u"), ku);
        report.measure(format!("{label}.C_q"), cq);
        report.measure(format!("{label}.C_ell"), cl);
        report.measure(format!("{label}.C_beside_greedy"), c31);
        report.measure(format!("{label}.Delta_property_f"), pf);
        let bands = [ku <= SLACK * (cq + c31), c31 <= SLACK * 2.0 * ku.max(1.0), c31 <= SLACK * cl.max(1.0) * pf.max(1.0)];
        report.measure(format!("{label}.bands_within"), bands.iter().filter(|&&b| b).count() as f64);
    }
    Ok(report.report_only())
}

pub fn relations(params: &Params, seed: u64) -> Result<CheckReport> {
    let trials = params.usize("trials", 24, 128)?;
    let max_size = params.usize("max_size", 16, 48)?;
    let f = FuncF::sqrt();
    let sampler = Sampler::Gaussian { support: 8, horizon: 24 };
    let mut report = CheckReport::new("", "");
    for (label, space) in
        [("l2", Space::lp(2.0)?), ("direct_sum", Space::direct_sum(1.0, 2.0)?), ("schreier", Space::schreier(f.clone()))]
    {
        let cl = estimate(ConstantName::CEll, &space, &f, &sampler, trials, seed)?;
        let caf = estimate(ConstantName::CAf, &space, &f, &sampler, trials, seed)?;
        let cgf = estimate(ConstantName::CGf, &space, &f, &sampler, trials, seed)?;
        let ksu = estimate(ConstantName::KSu, &space, &f, &sampler, trials, seed)?;
        let da = estimate(ConstantName::DeltaA, &space, &f, &Sampler::FarBlock { max_size, horizon: 64 }, max_size, seed)?;
        // same draws, denominators ordered ‖x‖ ≥ σ̃ ≥ σ
        if !le(cl, caf) || !le(caf, cgf) {
            report.fail(json!({ "space": space, "C_ell": cl, "C_af": caf, "C_gf": cgf, "seed": seed }));
        }
        let da = da.max(1.0);
        let k = ksu.max(1.0);
        report.measure(format!("{label}.C_ell"), cl);
        report.measure(format!("{label}.C_af"), caf);
        report.measure(format!("{label}.C_gf"), cgf);
        report.measure(format!("{label}.K_su"), ksu);
        report.measure(format!("{label}.Delta_A"), da);
        report.measure(format!("{label}.af_band_within"), f64::from(u8::from(caf <= SLACK * da)));
        report.measure(format!("{label}.gf_band_within"), f64::from(u8::from(cgf <= SLACK * da * (k * k + 2.0 * k))));
    }
    Ok(report.report_only())
}

pub fn equivalence(params: &Params, seed: u64) -> Result<CheckReport> {
    let horizons = params.usizes("horizons", &[16, 32, 64], &[16, 32, 64, 128, 256])?;
    let trials = params.usize("trials", 16, 64)?;
    let f = FuncF::compose(&FuncF::power(1.0, 0.9)?, &FuncF::sqrt());
    let space = Space::schreier(FuncF::sqrt());
    let mut report = CheckReport::new("", "");
    let mut gf = Vec::new();
    for &h in &horizons {
        let sampler = Sampler::Gaussian { support: 8.min(h), horizon: h };
        let caf = estimate(ConstantName::CAf, &space, &f, &sampler, trials, seed)?;
        let cgf = estimate(ConstantName::CGf, &space, &f, &sampler, trials, seed)?;
        report.measure(format!("C_af[horizon={h}]"), caf);
        report.measure(format!("C_gf[horizon={h}]"), cgf);
        gf.push(cgf);
    }
    let (lo, hi) = gf.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    report.measure("C_gf_spread", hi - lo);
    Ok(report.report_only())
}
