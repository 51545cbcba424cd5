//! One pass/fail line per acceptance criterion. Runs without the test
//! harness so that the lines always reach the output.

use std::process::ExitCode;
use std::time::Instant;

use chevalley::coxeter::{build_root_system, enumerate_strata, generate_group_f64, CoxeterType};
use chevalley::invariants::{basic_invariants, BuildOptions};
use chevalley::jacobian::{verify_det_factorization, verify_statement_33_orderings, RANK_REL_TOL};
use chevalley::probe::{
    connectivity_radius, critical_points, fiber_connectivity, fiber_value_interval, regular_target,
    sample_fiber,
};
use chevalley::regularity::{
    build_chamber_mesh, envelope_fiber_agreement, envelope_functions, image_graph, lift_derivatives,
    whitney_ratio, whitney_study, PairSpec,
};
use chevalley::Result;

const SEED: u64 = 7;

const C1_RUNTIME: f64 = 60.0;
const C2_RUNTIME: f64 = 60.0;
const C3_SAMPLES: usize = 100;
const C3_MINOR_TOL: f64 = 1e-9;
const C3_RUNTIME: f64 = 600.0;
const C4_VALUE_TOL: f64 = 1e-8;
const C4_MULTIPLIER_TOL: f64 = 1e-8;
const C4_EIGEN_GAP: f64 = 1e-6;
const C4_FIBERS: u64 = 20;
const C4_MULTISTARTS: usize = 32;
const C5_TARGETS: u64 = 100;
const C5_POINTS: usize = 2000;
const C5_CONNECTED_SHARE: f64 = 0.95;
const C5_MAX_GAP: f64 = 0.05;
const C6_A1_TOL: f64 = 1e-3;
const C6_B2_PAIR_TOL: f64 = 0.01;
const C6_PAIRS: usize = 5000;
const C6_MAX_CHANGE: f64 = 0.05;
const C6_RUNTIME_PER_TYPE: f64 = 900.0;
const C7_LIFT_TOL: f64 = 1e-8;
const C7_SCALING_TOL: f64 = 1e-4;
const C7_SAMPLES: usize = 100;
const C8_PITCH: f64 = 0.05;
const C8_BINS: usize = 20;
const C8_TARGETS: usize = 10;
const C8_POINTS: usize = 2000;
const C8_AGREEMENT: f64 = 1e-3;

type Criterion = fn() -> Result<(bool, String)>;

fn ty(s: &str) -> CoxeterType {
    s.parse().expect("valid type")
}

/// `det ∂(Σxᵢ, Σxᵢ², …, Σxᵢⁿ)/∂x = n!·∏_{i<j}(x_j − x_i)` (Vandermonde), and
/// the positive roots `e_i − e_j` give `∏_{i<j}(x_i − x_j)`.
fn newton_constant(n: u32) -> f64 {
    let fact: f64 = (1..=n).map(f64::from).product();
    let pairs = n * (n - 1) / 2;
    if pairs.is_multiple_of(2) {
        fact
    } else {
        -fact
    }
}

fn criterion1() -> Result<(bool, String)> {
    let t0 = Instant::now();
    let expected: [(&str, Option<f64>); 8] = [
        ("A3", Some(newton_constant(3))),
        ("A4", Some(newton_constant(4))),
        ("B2", Some(4.0)),
        ("B3", None),
        ("D4", None),
        ("G2", None),
        ("H3", None),
        ("F4", None),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, c) in expected {
        let t = ty(name);
        let f = verify_det_factorization(&basic_invariants(t)?, &build_root_system(t)?);
        match f {
            Ok(f) => {
                let good = f.exact && f.c != 0.0 && c.is_none_or(|c| f.c == c);
                ok &= good;
                notes.push(format!("{name} c={}", f.c_exact.unwrap_or_default()));
            }
            Err(e) => {
                ok = false;
                notes.push(format!("{name} {e}"));
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    ok &= secs <= C1_RUNTIME;
    Ok((ok, format!("{} [{secs:.1} s]", notes.join(", "))))
}

/// Degrees of the basic invariants, tabulated independently of the library.
fn degree_table() -> Vec<(String, Vec<u64>)> {
    let mut t: Vec<(String, Vec<u64>)> = vec![("A1".into(), vec![2])];
    for n in 2..=6u64 {
        t.push((format!("A{n}"), (1..=n).collect()));
    }
    for n in 2..=4u64 {
        t.push((format!("B{n}"), (1..=n).map(|i| 2 * i).collect()));
    }
    for n in 3..=6u64 {
        t.push((format!("D{n}"), (1..n).map(|i| 2 * i).chain([n]).collect()));
    }
    for p in 3..=12u64 {
        t.push((format!("I2:{p}"), vec![2, p]));
    }
    t.push(("H3".into(), vec![2, 6, 10]));
    t.push(("H4".into(), vec![2, 12, 20, 30]));
    t.push(("F4".into(), vec![2, 6, 8, 12]));
    t
}

fn criterion2() -> Result<(bool, String)> {
    let t0 = Instant::now();
    let mut bad = Vec::new();
    let table = degree_table();
    for (name, deg) in &table {
        let roots: u64 = deg.iter().map(|k| k - 1).sum();
        let order: u64 = deg.iter().product();
        let rs = build_root_system(ty(name))?;
        let g = generate_group_f64(&rs, order)?.len() as u64;
        if rs.len() as u64 != roots || g != order {
            bad.push(format!("{name}: {} roots, order {g}", rs.len()));
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let ok = bad.is_empty() && secs <= C2_RUNTIME;
    let note = if bad.is_empty() {
        format!("{} types, e.g. H3 15 roots/120, F4 24 roots/1152", table.len())
    } else {
        bad.join("; ")
    };
    Ok((ok, format!("{note} [{secs:.1} s]")))
}

fn criterion3() -> Result<(bool, String)> {
    let t0 = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for name in ["H3", "D6", "F4"] {
        let t = ty(name);
        let strata = enumerate_strata(&build_root_system(t)?);
        let reps = verify_statement_33_orderings(
            t,
            &strata,
            &BuildOptions::from_env(),
            C3_SAMPLES,
            SEED,
            C3_MINOR_TOL,
            RANK_REL_TOL,
        )?;
        let fails = reps.iter().filter(|(_, r)| !r.pass).count();
        ok &= fails == 0 && reps.iter().all(|(_, r)| r.samples >= C3_SAMPLES);
        let mut orders: Vec<String> = reps.iter().map(|(o, _)| format!("{o:?}")).collect();
        orders.sort();
        orders.dedup();
        notes.push(format!("{name} {} strata, {fails} violations", reps.len()));
        if matches!(t, CoxeterType::D(_)) {
            notes.push(format!("orders {}", orders.join("/")));
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    ok &= secs <= C3_RUNTIME;
    Ok((ok, format!("{} [{secs:.1} s]", notes.join(", "))))
}

fn criterion4() -> Result<(bool, String)> {
    let t = ty("B2");
    let (basis, rs) = (basic_invariants(t)?, build_root_system(t)?);
    let strata = enumerate_strata(&rs);
    let r = critical_points(&basis, &rs, &strata, 1, &[1.0], C4_MULTISTARTS, SEED)?;
    let mut vals: Vec<f64> = r.points.iter().map(|p| p.value).collect();
    vals.sort_by(f64::total_cmp);
    let mut ok = r.points.len() == 2
        && r.anomalies.is_empty()
        && (vals[0] - 0.0).abs() <= C4_VALUE_TOL
        && (vals[1] - 0.25).abs() <= C4_VALUE_TOL;
    if ok {
        let max = r.points.iter().max_by(|a, b| a.value.total_cmp(&b.value)).expect("two points");
        ok &= (max.multipliers[0] - 0.5).abs() <= C4_MULTIPLIER_TOL;
        ok &= r.points.iter().all(|p| {
            p.stratum_dim == 1 && p.hessian_eigenvalues.iter().all(|e| e.abs() >= C4_EIGEN_GAP)
        });
    }
    let mut note = format!("B2 values {vals:?}");
    for (name, ks) in [("B3", 1..3), ("A4", 2..4)] {
        let t = ty(name);
        let (basis, rs) = (basic_invariants(t)?, build_root_system(t)?);
        let strata = enumerate_strata(&rs);
        let mut anomalies = 0;
        let mut empty = 0;
        for k in ks {
            for i in 0..C4_FIBERS {
                let (_, m) = regular_target(&basis, &rs, k, SEED, i);
                let r = critical_points(&basis, &rs, &strata, k, &m, C4_MULTISTARTS, SEED)?;
                anomalies += r.anomalies.len();
                empty += usize::from(r.points.is_empty());
            }
        }
        ok &= anomalies == 0 && empty == 0;
        note.push_str(&format!(", {name} {anomalies} anomalies"));
    }
    Ok((ok, note))
}

fn criterion5() -> Result<(bool, String)> {
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, ks) in [("B3", 1..3), ("A4", 2..4)] {
        let t = ty(name);
        let (basis, rs) = (basic_invariants(t)?, build_root_system(t)?);
        for k in ks {
            let (mut nonempty, mut connected) = (0, 0);
            let (mut gap_n, mut gap_2n) = (0.0f64, 0.0f64);
            let (mut sum_n, mut sum_2n) = (0.0, 0.0);
            for i in 0..C5_TARGETS {
                let (_, m) = regular_target(&basis, &rs, k, SEED, i);
                let fs = sample_fiber(&basis, &rs, k, &m, C5_POINTS, SEED + i)?;
                if fs.is_empty() {
                    continue;
                }
                nonempty += 1;
                connected += usize::from(fiber_connectivity(&fs, connectivity_radius(&fs)) == 1);
                let g = fiber_value_interval(&fs, &basis)?.max_gap;
                let fs2 = sample_fiber(&basis, &rs, k, &m, 2 * C5_POINTS, SEED + i)?;
                let g2 = fiber_value_interval(&fs2, &basis)?.max_gap;
                gap_n = gap_n.max(g);
                gap_2n = gap_2n.max(g2);
                sum_n += g;
                sum_2n += g2;
            }
            let share = connected as f64 / nonempty.max(1) as f64;
            ok &= nonempty > 0 && share >= C5_CONNECTED_SHARE && gap_n <= C5_MAX_GAP && sum_2n < sum_n;
            notes.push(format!(
                "{name} k={k} connected {connected}/{nonempty}, gap {gap_n:.3} -> {gap_2n:.3}"
            ));
        }
    }
    Ok((ok, notes.join(", ")))
}

fn criterion6() -> Result<(bool, String)> {
    let mut ok = true;
    let mut notes = Vec::new();

    let t = ty("A1");
    let (basis, rs) = (basic_invariants(t)?, build_root_system(t)?);
    let g = image_graph(&build_chamber_mesh(&rs, 1.0, 0.02)?, &basis)?;
    let r = whitney_ratio(&g, &PairSpec::Random(C6_PAIRS), SEED)?;
    ok &= (r.max_ratio - 1.0).abs() <= C6_A1_TOL;
    notes.push(format!("A1 max {:.4}", r.max_ratio));

    // The geodesic hugs the parabola p₂ = p₁²/4: length √2 + asinh 1.
    let oracle = (2f64.sqrt() + 1f64.asinh()) / 5f64.sqrt();
    let t = ty("B2");
    let (basis, rs) = (basic_invariants(t)?, build_root_system(t)?);
    let g = image_graph(&build_chamber_mesh(&rs, 2.0, 0.02)?, &basis)?;
    let pair = (g.nearest_vertex(&[0.0, 0.0]), g.nearest_vertex(&[2.0, 1.0]));
    let r = whitney_ratio(&g, &PairSpec::Explicit(vec![pair]), SEED)?;
    ok &= (r.max_ratio - oracle).abs() <= C6_B2_PAIR_TOL;
    notes.push(format!("B2 pair {:.4} (oracle {oracle:.4})", r.max_ratio));

    for (name, h) in [("B2", 0.02), ("B3", 0.05), ("G2", 0.02), ("I2:7", 0.02), ("H3", 0.04)] {
        let t0 = Instant::now();
        let t = ty(name);
        let (basis, rs) = (basic_invariants(t)?, build_root_system(t)?);
        let r = whitney_study(&basis, &rs, 1.0, h, C6_PAIRS, SEED)?;
        let change = r.refinement_change.unwrap_or(f64::INFINITY);
        let secs = t0.elapsed().as_secs_f64();
        ok &= r.pairs == C6_PAIRS
            && r.max_ratio.is_finite()
            && change <= C6_MAX_CHANGE
            && secs <= C6_RUNTIME_PER_TYPE;
        notes.push(format!("{name} max {:.4} change {:.2}%", r.max_ratio, 100.0 * change));
    }
    Ok((ok, notes.join(", ")))
}

fn criterion7() -> Result<(bool, String)> {
    let t = ty("B2");
    let (basis, rs) = (basic_invariants(t)?, build_root_system(t)?);
    let strata = enumerate_strata(&rs);
    let diag = strata
        .iter()
        .find(|s| s.dim == 1 && (s.basis[0][0] - s.basis[0][1]).abs() < 1e-12)
        .expect("the wall x₁ = x₂ is a face of the B2 chamber");
    let r = lift_derivatives(&basis, diag, C7_SAMPLES, 1.0, SEED)?;
    let dev = r
        .samples
        .iter()
        .map(|s| (s.gradient[0] - s.image[0] / 2.0).abs())
        .fold(0.0, f64::max);
    let tiny = r.scaling.iter().find(|c| c.t <= 1e-6).expect("a check at |x| = 1e-6");
    let scale_dev = r.scaling.iter().map(|c| c.max_rel_dev).fold(0.0, f64::max);
    let ok = r.samples.len() == C7_SAMPLES
        && r.anomalies.is_empty()
        && dev <= C7_LIFT_TOL
        && tiny.sup_norm.is_finite()
        && scale_dev <= C7_SCALING_TOL;
    Ok((
        ok,
        format!("|g − p₁/2| ≤ {dev:.1e}, scaling deviation {scale_dev:.1e}, sup {:.3}", r.sup_norm),
    ))
}

fn criterion8() -> Result<(bool, String)> {
    let mut ok = true;
    let mut notes = Vec::new();
    for name in ["B2", "B3"] {
        let t = ty(name);
        let (basis, rs) = (basic_invariants(t)?, build_root_system(t)?);
        let strata = enumerate_strata(&rs);
        let mesh = build_chamber_mesh(&rs, 1.0, C8_PITCH)?;
        for k in 1..basis.dim() {
            let e = envelope_functions(&basis, &rs, &strata, &mesh, k, C8_BINS)?;
            let ag = envelope_fiber_agreement(&basis, &rs, &strata, k, C8_TARGETS, C8_POINTS, SEED)?;
            let dev = ag.iter().map(|a| a.deviation).fold(0.0, f64::max) / e.value_range;
            ok &= e.violations == 0 && dev <= C8_AGREEMENT;
            notes.push(format!("{name} k={k} {} outside, deviation {dev:.1e}", e.violations));
        }
    }
    Ok((ok, notes.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 8] = [
        ("exact Jacobian factorization", criterion1),
        ("root counts and group orders", criterion2),
        ("Jacobian rank on strata", criterion3),
        ("Morse critical points", criterion4),
        ("fiber connectivity and value intervals", criterion5),
        ("Whitney ratio", criterion6),
        ("lift derivatives", criterion7),
        ("envelope consistency", criterion8),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (ok, note) = f().unwrap_or_else(|e| (false, e.to_string()));
        all &= ok;
        println!("criterion {} {}: {name}: {note}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
