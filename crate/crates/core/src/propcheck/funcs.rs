use rand::Rng;
use serde_json::json;

use crate::error::Result;
use crate::funcf::{standard_grid, Dichotomy, FuncF, FuncKind};
use crate::report::CheckReport;

use super::util::{rng, standard_funcs};
use super::Params;

pub const CLASS_STATEMENT: &str =
    "for f in the class: f(a)/a >= f(b)/b when 0 < a <= b, f(x) <= x, and n <= f(m) implies n - k <= f(m - k) for 0 <= k <= n";

pub const DICHOTOMY_STATEMENT: &str =
    "every f in the class is either the identity or satisfies f(x) <= x/lambda for some lambda > 1 and all large x";

fn members() -> Vec<FuncF> {
    let mut fs = standard_funcs();
    let bounded = FuncF::bounded(2.0).expect("member");
    fs.push(FuncF::compose(&FuncF::sqrt(), &bounded));
    fs.push(FuncF::compose(&FuncF::sqrt(), &FuncF::sqrt()));
    fs.push(FuncF::power(0.5, 0.7).expect("member"));
    fs
}

pub fn class_properties(params: &Params, seed: u64) -> Result<CheckReport> {
    let horizon = params.usize("horizon", 1000, 4000)?;
    let triples = params.usize("shift_trials", 10_000, 100_000)?;
    let fs = params.funcs("funcs", members())?;
    let mut report = CheckReport::new("", "");
    let grid = standard_grid(horizon as f64);
    let (mut grid_bad, mut bound_bad, mut shift_bad, mut antecedent) = (0usize, 0usize, 0usize, 0usize);

    for (i, f) in fs.iter().enumerate() {
        let membership = f.verify_membership(&grid);
        if !membership.passed() {
            grid_bad += 1;
            report.fail(json!({ "func": f, "membership": membership.witnesses }));
        }
        for m in 0..=horizon {
            if f.at(m) > m as f64 * (1.0 + 1e-12) {
                bound_bad += 1;
                report.fail(json!({ "func": f, "x": m, "f(x)": f.at(m) }));
            }
        }
        let mut r = rng(seed, i as u64);
        for t in 0..triples {
            let m: u64 = r.gen_range(1..=horizon as u64);
            let fm = f.at(m as usize).floor() as u64;
            // half the draws satisfy the antecedent n <= f(m) by construction
            let n: u64 = if t % 2 == 0 && fm >= 1 { r.gen_range(1..=fm) } else { r.gen_range(1..=m) };
            let k: u64 = r.gen_range(0..=n);
            if (n as f64) <= f.at(m as usize) {
                antecedent += 1;
            }
            if !f.check_shift_property(m, n, k)? {
                shift_bad += 1;
                report.fail(json!({ "func": f, "m": m, "n": n, "k": k }));
            }
        }
    }

    // A non-member must be rejected, or the grid check proves nothing.
    let square = FuncF::unchecked(FuncKind::Power { c: 1.0, gamma: 2.0 }, "x^2");
    let rejected = !square.verify_membership(&grid).passed();
    if !rejected {
        report.fail(json!({ "control": "x^2 accepted as a member" }));
    }

    report.measure("functions", fs.len() as f64);
    report.measure("grid_points", grid.len() as f64);
    report.measure("membership_failures", grid_bad as f64);
    report.measure("bound_violations", bound_bad as f64);
    report.measure("shift_trials", (triples * fs.len()) as f64);
    report.measure("shift_antecedent_true", antecedent as f64);
    report.measure("shift_violations", shift_bad as f64);
    report.measure("control_rejected", f64::from(u8::from(rejected)));
    Ok(report)
}

pub fn dichotomy(params: &Params, _seed: u64) -> Result<CheckReport> {
    let horizon = params.usize("horizon", 10_000, 100_000)?;
    let fs = params.funcs("funcs", members())?;
    let mut report = CheckReport::new("", "");
    let (mut identity, mut sublinear, mut inconclusive) = (0usize, 0usize, 0usize);
    for f in &fs {
        match f.classify_dichotomy(horizon as u64) {
            Dichotomy::Identity => {
                identity += 1;
                // an identity verdict must survive a check away from the integers
                if (0..1000).any(|i| (f.eval(i as f64 * 0.37).unwrap_or(f64::NAN) - i as f64 * 0.37).abs() > 1e-9) {
                    report.fail(json!({ "func": f, "verdict": "identity" }));
                }
            }
            Dichotomy::Sublinear { lambda, x0 } => {
                sublinear += 1;
                // recheck the certificate independently
                let bad = (x0..=horizon as u64).find(|&m| f.at(m as usize) > m as f64 / lambda * (1.0 + 1e-12) + 1e-12);
                if !(lambda > 1.0) || bad.is_some() || f.is_identity() {
                    report.fail(json!({ "func": f, "lambda": lambda, "x0": x0, "counterexample": bad }));
                }
                report.measure(format!("lambda[{}]", f.label()), lambda);
            }
            Dichotomy::Inconclusive { reason } => {
                inconclusive += 1;
                report.witness(json!({ "func": f, "inconclusive": reason }));
            }
        }
    }
    report.measure("identity", identity as f64);
    report.measure("sublinear", sublinear as f64);
    report.measure("inconclusive", inconclusive as f64);
    Ok(if inconclusive > 0 { report.report_only() } else { report })
}
