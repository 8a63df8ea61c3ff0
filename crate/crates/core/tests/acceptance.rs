//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use tgalab::oracle::{sigma_profile, sigma_tilde_profile, DEFAULT_TOL};
use tgalab::propcheck::{run_suite, suite_exit_code};
use tgalab::{run_check, CheckReport, CheckStatus, Sampler, Space, Tier};

const SEED: u64 = 42;

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(id: &str, params: Value) -> (CheckReport, Duration) {
    let start = Instant::now();
    let report = run_check(id, &params, SEED).unwrap_or_else(|e| panic!("{id}: {e}"));
    (report, start.elapsed())
}

fn m(r: &CheckReport, key: &str) -> f64 {
    *r.measured.get(key).unwrap_or_else(|| panic!("{}: no measurement `{key}`", r.check_id))
}

fn c1() -> Outcome {
    let (r, t) = check("f_greedy_set_criteria", json!({ "vectors": 200, "max_support": 8 }));
    let agreement = m(&r, "agreement");
    Outcome {
        ok: r.status == CheckStatus::Pass && agreement == 1.0 && t.as_secs_f64() < 30.0,
        detail: format!("agreement={agreement} instances={} time={:.2}s", m(&r, "instances"), t.as_secs_f64()),
    }
}

fn c2() -> Outcome {
    let (r, t) = check("schreier_prefix_sandwich", json!({ "max_n": 2000, "vectors": 1000, "max_support": 16 }));
    Outcome {
        ok: r.status == CheckStatus::Pass && m(&r, "enumeration_vectors") == 1000.0 && t.as_secs_f64() < 20.0,
        detail: format!(
            "witnesses={} gaussian_max_rel_diff={:.3e} time={:.2}s",
            r.witnesses.len(),
            m(&r, "gaussian_max_rel_diff"),
            t.as_secs_f64()
        ),
    }
}

fn c3() -> Outcome {
    let (r, _) = check("schreier_separation", json!({ "m": [16, 64, 256, 1024] }));
    let ratios: Vec<String> = [16, 64, 256, 1024]
        .iter()
        .map(|k| format!("{k}:{:.3}/{:.3}", m(&r, &format!("ratio[m={k}]")), m(&r, &format!("curve[m={k}]"))))
        .collect();
    let d = m(&r, "Delta_d_g");
    Outcome {
        ok: r.status == CheckStatus::Pass && d <= 4.0,
        detail: format!("ratio/curve {} Delta_d={d}", ratios.join(" ")),
    }
}

fn c4() -> Outcome {
    let (r, _) = check("interleaved_sum_democracy", json!({ "max_size": 64 }));
    let worst = m(&r, "max_sqrt_ratio");
    let eq = m(&r, "equal_size_ratio[m=64]");
    Outcome {
        ok: r.status == CheckStatus::Pass && worst <= 1.5 && eq >= 6.0,
        detail: format!("max_sqrt_ratio={worst:.4} equal_size_ratio[64]={eq:.4}"),
    }
}

fn c5() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    let mut count = 0;
    for (si, p) in [1.0, 2.0, 4.0].into_iter().enumerate() {
        let space = Space::lp(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + si as u64);
        for _ in 0..100 {
            let support = rng.gen_range(1..=10);
            let x = Sampler::Gaussian { support, horizon: 30 }.draw_vector(&mut rng).unwrap();
            let free = sigma_profile(&x, 5, &space, DEFAULT_TOL).unwrap();
            let proj = sigma_tilde_profile(&x, 5, &space).unwrap();
            for k in 0..=5 {
                worst = worst.max((free[k] - proj[k]).abs());
            }
            monotone &= free.windows(2).all(|w| w[1] <= w[0]);
            count += 1;
        }
    }
    Outcome {
        ok: worst <= 1e-6 && monotone,
        detail: format!("vectors={count} max|sigma-sigma_tilde|={worst:.3e} monotone={monotone}"),
    }
}

fn c6() -> Outcome {
    let (a, _) = check("kt_conditionality", json!({ "log2_dimensions": [6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16] }));
    let (b, _) = check("kt_property_f", json!({ "configurations": 10_000, "lambdas": [1.5, 2.0, 4.0] }));
    let growth = m(&a, "growth_16_over_10");
    Outcome {
        ok: a.status == CheckStatus::Pass && b.status == CheckStatus::Pass && growth >= 1.25,
        detail: format!(
            "K_su[2^6]={:.4} K_su[2^16]={:.4} growth={growth:.4} property_violations={}",
            m(&a, "K_su[N=2^6]"),
            m(&a, "K_su[N=2^16]"),
            b.witnesses.len()
        ),
    }
}

fn c7() -> Outcome {
    let (r, _) = check("weighted_property_f", json!({ "configurations": 10_000, "lambdas": [1.5, 2.0, 4.0] }));
    let (n1, n2) = (m(&r, "N_1"), m(&r, "N_2"));
    Outcome {
        ok: r.status == CheckStatus::Pass && n1 == 11.0 && n2 / n1 > 10.0,
        detail: format!("N_1={n1} N_2={n2} property_violations={}", r.witnesses.len()),
    }
}

fn c8() -> Outcome {
    let (r, _) = check("z_space_not_f_unconditional", json!({ "log2_dimension": 14 }));
    let ratio = m(&r, "ratio");
    Outcome {
        ok: r.status == CheckStatus::Pass && ratio > 4.0,
        detail: format!("ratio={ratio:.4} needed>4 kt_projection_cap={:.4}", m(&r, "kt_projection_cap")),
    }
}

fn c9() -> Outcome {
    let (r, _) = check("haar_growth_bands", json!({ "d2": true }));
    Outcome {
        ok: r.status == CheckStatus::Pass,
        detail: format!(
            "d1.full={:.4} d1.partial={:.4} d2={:.4}",
            m(&r, "d1.full_level_slope"),
            m(&r, "d1.partial_level_slope"),
            m(&r, "d2.slope")
        ),
    }
}

fn c10() -> Outcome {
    let start = Instant::now();
    let first = run_suite(Tier::Fast, SEED);
    let elapsed = start.elapsed().as_secs_f64();
    let second = run_suite(Tier::Fast, SEED);
    let same = serde_json::to_string(&first).unwrap() == serde_json::to_string(&second).unwrap();
    let code = suite_exit_code(&first);
    Outcome {
        ok: same && code == 0 && elapsed < 60.0,
        detail: format!("identical={same} exit={code} fast_tier={elapsed:.2}s"),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("f-greedy oracle agreement", c1),
        ("Schreier prefix sandwich", c2),
        ("Schreier separation", c3),
        ("interleaved democracy", c4),
        ("sigma oracle consistency", c5),
        ("KT conditionality and Property(x/lambda)", c6),
        ("weight recursion", c7),
        ("z-space at L = 4", c8),
        ("Haar bands", c9),
        ("suite determinism", c10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.ok {
            failed += 1;
        }
        println!("{} {:>2} {name}: {}", if o.ok { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
