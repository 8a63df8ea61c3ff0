use rand::Rng;
use serde_json::json;

use crate::error::Result;
use crate::funcf::FuncF;
use crate::greedy::{greedy_sets, truncate, TiePolicy};
use crate::oracle::{estimate_constant, sigma_profile, ConstantName, Sampler, DEFAULT_TOL};
use crate::report::CheckReport;
use crate::space::Space;
use crate::vector::{ones, SparseVector};

use super::util::{horizon, lattice_spaces, le, rng};
use super::Params;

pub const UL_STATEMENT: &str = "a C-suppression quasi-greedy basis satisfies (1/2C) min|a_n| ||1_A|| <= ||sum a_n e_n|| <= 2C max|a_n| ||1_A||";
pub const TRUNCATION_STATEMENT: &str = "for a C-suppression quasi-greedy basis every truncation operator T_alpha has norm at most C";
pub const LEBESGUE_STATEMENT: &str =
    "||x - P_Lambda x|| <= (1 + 3 c2^2 N) sigma_m(x) for every m <= N and every greedy set Lambda of order m";
pub const AG_STATEMENT: &str = "an almost greedy basis is f-greedy for every non-identity f; measured on l2 with f = sqrt";

fn draw(space: &Space, max_support: usize, r: &mut rand_chacha::ChaCha8Rng) -> Result<SparseVector> {
    let h = horizon(space, 64);
    let support = r.gen_range(1..=max_support.min(h));
    Sampler::Gaussian { support, horizon: h }.draw_vector(r)
}

pub fn ul_property(params: &Params, seed: u64) -> Result<CheckReport> {
    let trials = params.usize("trials", 200, 2000)?;
    let max_support = params.usize("max_support", 10, 16)?;
    let mut report = CheckReport::new("", "");
    let mut violations = 0usize;
    for (si, space) in lattice_spaces().iter().enumerate() {
        let mut r = rng(seed, si as u64);
        for _ in 0..trials {
            let x = draw(space, max_support, &mut r)?;
            let (lo, hi) = moduli_range(&x);
            let ind = space.norm(&ones(&x.support_set()))?;
            let xn = space.norm(&x)?;
            if !le(0.5 * lo * ind, xn) || !le(xn, 2.0 * hi * ind) {
                violations += 1;
                report.fail(json!({ "space": space, "x": x }));
            }
        }
    }
    report.measure("lattice_trials", (trials * lattice_spaces().len()) as f64);
    report.measure("lattice_violations", violations as f64);

    // Non-lattice spaces: the constant is estimated, so only measure.
    let soft = [Space::kt(), Space::weighted(2)?];
    for (si, space) in soft.iter().enumerate() {
        let name = if si == 0 { "kt" } else { "weighted" };
        let h = horizon(space, 64);
        let c = estimate_constant(
            ConstantName::CEll,
            space,
            None,
            &Sampler::Gaussian { support: 8, horizon: h },
            32,
            seed ^ 0x5eed,
        )?
        .value;
        let mut r = rng(seed, 100 + si as u64);
        let (mut upper, mut lower, mut soft_bad) = (0.0f64, 0.0f64, 0usize);
        for _ in 0..trials {
            let x = draw(space, max_support, &mut r)?;
            let (lo, hi) = moduli_range(&x);
            let ind = space.norm(&ones(&x.support_set()))?;
            let xn = space.norm(&x)?;
            upper = upper.max(xn / (hi * ind));
            lower = lower.max(lo * ind / xn);
            if !le(lo * ind / (2.0 * c), xn) || !le(xn, 2.0 * c * hi * ind) {
                soft_bad += 1;
            }
        }
        report.measure(format!("{name}_c_ell_estimate"), c);
        report.measure(format!("{name}_upper_ratio"), upper);
        report.measure(format!("{name}_lower_ratio"), lower);
        report.measure(format!("{name}_violations_at_estimate"), soft_bad as f64);
    }
    Ok(report)
}

fn moduli_range(x: &SparseVector) -> (f64, f64) {
    x.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), (_, v)| (lo.min(v.abs()), hi.max(v.abs())))
}

pub fn truncation_bound(params: &Params, seed: u64) -> Result<CheckReport> {
    let trials = params.usize("trials", 200, 2000)?;
    let max_support = params.usize("max_support", 10, 16)?;
    let mut report = CheckReport::new("", "");
    let (mut count, mut violations, mut worst) = (0usize, 0usize, 0.0f64);
    for (si, space) in lattice_spaces().iter().enumerate() {
        let mut r = rng(seed, si as u64);
        for _ in 0..trials {
            let x = draw(space, max_support, &mut r)?;
            let xn = space.norm(&x)?;
            let mut alphas: Vec<f64> = x.iter().map(|(_, v)| v.abs()).collect();
            let top = x.sup_norm();
            alphas.extend([r.gen_range(0.0..top), 0.5 * top, 2.0 * top, 1e-3 * top]);
            for alpha in alphas.into_iter().filter(|a| *a > 0.0) {
                let t = truncate(&x, alpha)?;
                let tn = space.norm(&t)?;
                count += 1;
                worst = worst.max(tn / xn);
                let idempotent = truncate(&t, alpha)? == t;
                if !le(tn, xn) || !idempotent || t.sup_norm() > alpha {
                    violations += 1;
                    report.fail(json!({ "space": space, "x": x, "alpha": alpha }));
                }
            }
        }
    }
    report.measure("truncations", count as f64);
    report.measure("violations", violations as f64);
    report.measure("max_ratio", worst);
    Ok(report)
}

pub fn lebesgue_bound(params: &Params, seed: u64) -> Result<CheckReport> {
    let vectors = params.usize("vectors", 12, 60)?;
    let max_support = params.usize("max_support", 6, 7)?;
    let spaces = vec![
        Space::lp(1.0)?,
        Space::lp(2.0)?,
        Space::c0(),
        Space::direct_sum(1.0, 2.0)?,
        Space::schreier(FuncF::sqrt()),
        Space::kt(),
        Space::weighted(1)?,
        Space::haar(3.0, 1, 4)?,
        Space::kt_c0_sum(),
    ];
    let mut report = CheckReport::new("", "");
    let (mut sets, mut violations, mut worst) = (0usize, 0usize, 0.0f64);
    for (si, space) in spaces.iter().enumerate() {
        let mut r = rng(seed, si as u64);
        let h = horizon(space, 12);
        for t in 0..vectors {
            let support = r.gen_range(1..=max_support.min(h));
            // ±1 combs exercise ties, where many greedy sets exist
            let sampler = if t % 3 == 0 {
                Sampler::SignComb { support, horizon: h }
            } else {
                Sampler::Gaussian { support, horizon: h }
            };
            let x = sampler.draw_vector(&mut r)?;
            let s = x.nnz();
            let sig = sigma_profile(&x, s, space, DEFAULT_TOL)?;
            let dim = x.max_index().unwrap_or(1);
            for m in 1..=s {
                let bound = (1.0 + 3.0 * space.c2().powi(2) * m as f64) * sig[m];
                for set in greedy_sets(&x, m, TiePolicy::EnumerateAll, dim)? {
                    let err = space.norm(&x.project_complement(&set))?;
                    sets += 1;
                    if sig[m] > 0.0 {
                        worst = worst.max(err / sig[m]);
                    }
                    if err > bound + 1e-9 {
                        violations += 1;
                        report.fail(json!({ "space": space, "x": x, "m": m, "lambda": set }));
                    }
                }
            }
        }
    }
    report.measure("greedy_sets", sets as f64);
    report.measure("violations", violations as f64);
    report.measure("max_error_over_sigma", worst);
    Ok(report)
}

pub fn almost_greedy_implies_f_greedy(params: &Params, seed: u64) -> Result<CheckReport> {
    let supports = params.usizes("supports", &[4, 6, 8], &[4, 6, 8, 10, 12])?;
    let trials = params.usize("trials", 16, 64)?;
    let space = Space::lp(2.0)?;
    let f = FuncF::sqrt();
    let mut report = CheckReport::new("", "");
    let mut values = Vec::new();
    for &s in &supports {
        let est = estimate_constant(
            ConstantName::CGf,
            &space,
            Some(&f),
            &Sampler::Gaussian { support: s, horizon: 3 * s },
            trials,
            seed.wrapping_add(s as u64),
        )?;
        report.measure(format!("C_gf[support={s}]"), est.value);
        values.push(est.value);
    }
    let (lo, hi) = values.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    report.measure("spread", hi - lo);
    Ok(report.report_only())
}
