//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.
#![allow(clippy::needless_range_loop, clippy::type_complexity)]

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use torfill_core::{
    adapted_basis, best_gamma, check_truncated, complement_measure_estimate, critical_cutoff, duality_check,
    empirical_fill_time, filling_time_bound, hitting_time, random_direction, successive_minima, Budget, CylinderBody,
    DiamondBody, DioParams, DirectionVector, FillOptions,
};

const PHI: f64 = 1.618_033_988_749_895;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn fmt_k(k: &[i64]) -> String {
    format!("{k:?}")
}

/// Plain floating split `k = u alpha + v`, returning `(|u|, |v|)`.
fn split(alpha: &[f64], k: &[i64]) -> (f64, f64) {
    let u: f64 = alpha.iter().zip(k).map(|(a, &b)| a * b as f64).sum();
    let v2: f64 = alpha.iter().zip(k).map(|(a, &b)| (b as f64 - u * a).powi(2)).sum();
    (u.abs(), v2.sqrt())
}

fn box_points(n: usize, half: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-half..=half).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out.retain(|p| p.iter().any(|&x| x != 0));
    out
}

fn det(cols: &[Vec<i64>]) -> i128 {
    let m = |r: usize, c: usize| cols[c][r] as i128;
    match cols.len() {
        2 => m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0),
        3 => {
            m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
        }
        n => panic!("no closed-form determinant for n = {n}"),
    }
}

fn rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())) else { break };
        if m[p][c].abs() < 1e-9 {
            continue;
        }
        m.swap(r, p);
        for i in r + 1..m.len() {
            let f = m[i][c] / m[r][c];
            for j in 0..cols {
                m[i][j] -= f * m[r][j];
            }
        }
        r += 1;
    }
    r
}

/// Successive minima by scanning a box that certainly holds `n` independent
/// points of dilation at most `reach`.
fn naive_minima(n: usize, gauge: &dyn Fn(&[i64]) -> f64, half: i64) -> Vec<f64> {
    let mut pts: Vec<(f64, Vec<i64>)> = box_points(n, half).into_iter().map(|k| (gauge(&k), k)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut chosen: Vec<Vec<i64>> = Vec::new();
    let mut lambdas = Vec::new();
    for (g, k) in pts {
        chosen.push(k);
        if rank(&chosen) == chosen.len() {
            lambdas.push(g);
            if lambdas.len() == n {
                break;
            }
        } else {
            chosen.pop();
        }
    }
    lambdas
}

fn criterion_1() -> Outcome {
    let out = torfill::run(["demo-resonant", "--q", "1,2,3,4,5", "--simulate", "--format", "json"]);
    let report: Value = match serde_json::from_str(&out.stdout) {
        Ok(v) => v,
        Err(e) => return outcome(false, format!("unparseable report ({e}): {}", out.stderr)),
    };
    let mut ok = out.code == 0;
    let mut parts = Vec::new();
    for row in report["result"]["rows"].as_array().into_iter().flatten() {
        let expected = row["expected_time"].as_f64().unwrap_or(f64::NAN);
        let dt = row["dt"].as_f64().unwrap_or(f64::NAN);
        let measured = row["measured_time"].as_f64();
        let within = measured.is_some_and(|m| (m - expected).abs() <= 2.0 * dt);
        ok &= within;
        parts.push(format!(
            "q={} T={:.4} measured={} ({:+.2} dt)",
            row["q"],
            expected,
            measured.map_or("none".into(), |m| format!("{m:.4}")),
            measured.map_or(f64::NAN, |m| (m - expected) / dt)
        ));
    }
    ok &= parts.len() == 5;
    outcome(ok, parts.join(", "))
}

fn criterion_2() -> Outcome {
    let alpha = DirectionVector::normalize(&[1.0, PHI]).unwrap();
    let cutoff = critical_cutoff(2, 0.1).unwrap();
    let bg = best_gamma(&alpha, 1.0, cutoff, Budget::default()).unwrap();
    let oracle = box_points(2, 90)
        .into_iter()
        .filter(|k| ((k[0] * k[0] + k[1] * k[1]) as f64) <= 8100.0)
        .map(|k| {
            let norm = ((k[0] * k[0] + k[1] * k[1]) as f64).sqrt();
            split(alpha.coords(), &k).0 * norm
        })
        .fold(f64::INFINITY, f64::min);
    let gamma_ok = (bg.gamma_max - oracle).abs() < 1e-9 && (bg.gamma_max - 0.447).abs() < 5e-4;

    let params = DioParams::new(2, 1.0, 0.4, Some(cutoff)).unwrap();
    let basis = match adapted_basis(&alpha, &params, Budget::default()) {
        Ok(b) => b,
        Err(e) => return outcome(false, format!("adapted basis failed: {e}")),
    };
    let bound = filling_time_bound(2, 1.0, 0.4, 0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut max_d, mut max_t, mut bad) = (0.0f64, 0.0f64, 0);
    for _ in 0..1000 {
        let theta = [rng.random::<f64>(), rng.random::<f64>()];
        let c = hitting_time(&basis, &theta, 0.1).unwrap();
        if !(c.endpoint_distance < 0.1 + 1e-9 && c.time < bound) {
            bad += 1;
        }
        max_d = max_d.max(c.endpoint_distance);
        max_t = max_t.max(c.time);
    }
    outcome(
        gamma_ok && cutoff == 90.0 && (bound - 2025.0).abs() < 1e-9 && bad == 0,
        format!(
            "N*={cutoff}, gamma_max={:.10} (oracle {oracle:.10}, k={}), 1000 targets: max distance {max_d:.4} < 0.1, max T {max_t:.1} < {bound:.0}, failures {bad}",
            bg.gamma_max,
            fmt_k(&bg.argmin_k)
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let delta = 0.2;
    let mut failures = Vec::new();
    let mut counts = Vec::new();
    for n in 2..=3usize {
        let cutoff = critical_cutoff(n, delta).unwrap();
        let params = DioParams::new(n, n as f64, 0.05, Some(cutoff)).unwrap();
        let nf = n as f64 * factorial(n);
        let (mut built, mut drawn) = (0, 0);
        while built < 100 {
            let alpha = random_direction(&mut rng, n);
            drawn += 1;
            if !check_truncated(&alpha, &params, Budget::default()).unwrap().passed() {
                continue;
            }
            built += 1;
            let b = match adapted_basis(&alpha, &params, Budget::default()) {
                Ok(b) => b,
                Err(e) => {
                    failures.push(format!("n={n}: {e}"));
                    continue;
                }
            };
            let cols = b.integer_basis().columns();
            let d = det(cols);
            for w in cols {
                let x: f64 = w.iter().zip(alpha.coords()).map(|(&wi, a)| wi as f64 * a).sum();
                let i_ok = 3f64.sqrt() / 2.0 < x && x <= nf * cutoff.powf(n as f64) / 0.05;
                let dev: f64 =
                    w.iter().zip(alpha.coords()).map(|(&wi, a)| (a - wi as f64 / x).powi(2)).sum::<f64>().sqrt();
                let ii_ok = dev <= nf / (x * (cutoff - 1.0));
                if !(i_ok && ii_ok) {
                    failures.push(format!("n={n}: column {} x={x} deviation={dev}", fmt_k(w)));
                }
            }
            if d.abs() != 1 {
                failures.push(format!("n={n}: determinant {d}"));
            }
        }
        counts.push(format!("n={n}: 100 bases ({drawn} draws, N*={cutoff})"));
    }
    let detail = if failures.is_empty() {
        format!("{}, 0 failures", counts.join("; "))
    } else {
        format!("{} failures, first: {}", failures.len(), failures[0])
    };
    outcome(failures.is_empty(), detail)
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = Vec::new();
    let mut ok = true;
    for n in 2..=4usize {
        let fact = factorial(n);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for _ in 0..100 {
            let alpha = random_direction(&mut rng, n);
            let a = 10f64.powf(rng.random_range(-1.0..1.0));
            let b = 10f64.powf(rng.random_range(-1.0..1.0));
            let body = CylinderBody::new(alpha, a, b).unwrap();
            match duality_check(&body, Budget::default()) {
                Ok(ps) => {
                    for p in ps {
                        lo = lo.min(p);
                        hi = hi.max(p);
                        ok &= (1.0 - 1e-9..=fact + 1e-9).contains(&p);
                    }
                }
                Err(e) => {
                    ok = false;
                    worst.push(format!("n={n}: {e}"));
                }
            }
        }
        worst.push(format!("n={n}: products in [{lo:.4}, {hi:.4}] within [1, {fact}]"));
    }
    let aligned = CylinderBody::new(DirectionVector::new(vec![1.0, 0.0]).unwrap(), 3.0, 0.4).unwrap();
    let exact = duality_check(&aligned, Budget::default()).unwrap();
    ok &= exact == vec![1.0, 1.0];
    worst.push(format!("aligned a=3 b=0.4: {exact:?}"));
    outcome(ok, worst.join("; "))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let delta = 0.1;
    let (tau, gamma) = (1.0, 0.1);
    let cutoff = critical_cutoff(2, delta).unwrap();
    let params = DioParams::new(2, tau, gamma, Some(cutoff)).unwrap();
    let bound = filling_time_bound(2, tau, gamma, delta).unwrap();
    let (mut tested, mut ok, mut slowest) = (0, true, 0.0f64);
    while tested < 20 {
        let alpha = random_direction(&mut rng, 2);
        if !check_truncated(&alpha, &params, Budget::default()).unwrap().passed() {
            continue;
        }
        tested += 1;
        let res = empirical_fill_time(&alpha, &[0.0, 0.0], delta, &FillOptions::for_delta(delta, bound)).unwrap();
        match res.fill_time {
            Some(t) => {
                slowest = slowest.max(t);
                ok &= t <= bound;
            }
            None => ok = false,
        }
    }
    outcome(ok, format!("20 directions in D(tau=1, gamma=0.1, N=90): slowest fill {slowest:.2} <= bound {bound:.0}"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut mismatches = Vec::new();
    for trial in 0..50 {
        let n = 2 + trial % 2;
        let alpha = random_direction(&mut rng, n);
        let (a, b) = (rng.random_range(0.3..3.0), rng.random_range(0.3..3.0));
        let coords = alpha.coords().to_vec();
        let (m, gauge): (_, Box<dyn Fn(&[i64]) -> f64>) = if trial % 4 < 2 {
            let body = CylinderBody::new(alpha, a, b).unwrap();
            let g = move |k: &[i64]| {
                let (u, v) = split(&coords, k);
                (u / a).max(v / b)
            };
            (successive_minima(&body, Budget::default()).unwrap(), Box::new(g))
        } else {
            let body = DiamondBody::new(alpha, a, b).unwrap();
            let g = move |k: &[i64]| {
                let (u, v) = split(&coords, k);
                a * u + b * v
            };
            (successive_minima(&body, Budget::default()).unwrap(), Box::new(g))
        };
        // Unit vectors bound lambda_n; every point of dilation <= reach has
        // norm <= reach * (a^2 + b^2)^(1/2) or reach / min(a, b).
        let reach = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                gauge(&e)
            })
            .fold(0.0, f64::max);
        let half = (reach * a.hypot(b).max(1.0 / a.min(b))).ceil() as i64;
        let naive = naive_minima(n, &*gauge, half);
        for j in 0..n {
            let tol = 1e-12 * naive[j].max(1.0);
            if (m.lambdas[j] - naive[j]).abs() > tol || (gauge(&m.witnesses[j]) - naive[j]).abs() > tol {
                mismatches.push(format!("trial {trial} j={j}: {} vs {}", m.lambdas[j], naive[j]));
            }
        }
    }
    let detail = if mismatches.is_empty() {
        "50 bodies (25 cylinders, 25 diamonds, n=2,3): all minima and witness dilations agree to 1e-12".into()
    } else {
        format!("{} mismatches, first: {}", mismatches.len(), mismatches[0])
    };
    outcome(mismatches.is_empty(), detail)
}

fn criterion_7() -> Outcome {
    let est: Vec<_> = [0.01, 0.02, 0.04]
        .iter()
        .map(|&g| {
            let p = DioParams::new(2, 2.0, g, Some(20.0)).unwrap();
            complement_measure_estimate(&p, 100_000, 7, Budget::default()).unwrap()
        })
        .collect();
    let monotone = est.windows(2).all(|w| w[0].fraction < w[1].fraction);
    let ratio = est[1].fraction / est[0].fraction;
    outcome(
        monotone && (1.4..=2.6).contains(&ratio),
        format!(
            "fractions {:.5} ({:.5}), {:.5} ({:.5}), {:.5} ({:.5}); ratio 0.02/0.01 = {ratio:.3}",
            est[0].fraction, est[0].stderr, est[1].fraction, est[1].stderr, est[2].fraction, est[2].stderr
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Option<f64>, fn() -> Outcome); 7] = [
        ("resonant reference reproduction", Some(5.0), criterion_1),
        ("filling certificate end to end (n=2)", Some(2.0), criterion_2),
        ("adapted basis invariants", None, criterion_3),
        ("duality products", Some(30.0), criterion_4),
        ("simulated fill below the bound", None, criterion_5),
        ("successive minima against naive oracle", None, criterion_6),
        ("excluded measure scaling", None, criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let secs = start.elapsed().as_secs_f64();
        let in_time = limit.is_none_or(|l| secs < l);
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget = limit.map_or(String::new(), |l| format!(", limit {l} s"));
        println!(
            "criterion {}: {} | {name} | {} | {secs:.2} s{budget}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            out.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
