use std::path::Path;
use std::time::Instant;

use chevalley::coxeter::{build_root_system, enumerate_strata, generate_group_f64, CoxeterType, RootSystem, Stratum};
use chevalley::invariants::{
    basic_invariants_with, basis_hash, verify_invariance, verify_invariance_f64, write_basis_file,
    BuildOptions, InvariantBasis,
};
use chevalley::jacobian::{verify_det_factorization, verify_statement_33_orderings};
use chevalley::probe::{
    connectivity_radius, critical_points, fiber_connectivity, fiber_value_interval, regular_target,
    sample_fiber_with, HESSIAN_GAP,
};
use chevalley::regularity::{
    build_chamber_mesh, envelope_fiber_agreement, envelope_functions, lift_derivatives,
    whitney_study, RatioReport,
};
use chevalley::{Error, Result};

use crate::config::{Command, RunConfig};
use crate::explain::claim;
use crate::report::{parse_report, Check, Status, SuiteReport};

/// Largest sorted-value gap of a fiber sample, relative to its range.
pub const MAX_VALUE_GAP: f64 = 0.05;
/// Share of nonempty sampled fibers that must form one component.
pub const CONNECTED_SHARE: f64 = 0.95;
/// Largest relative change of the Whitney ratio when `h` is halved.
pub const MAX_REFINEMENT_CHANGE: f64 = 0.05;
/// Agreement of `g_j(tu)/t^{d_{k+1}−d_j}` with `g_j(u)` at small `t`.
pub const SCALING_AGREEMENT: f64 = 1e-4;
/// Envelope against polished fiber intervals, relative to the range of `p_{k+1}`.
pub const ENVELOPE_AGREEMENT: f64 = 1e-3;
/// Invariance defect tolerated when the group is only known in floating point.
pub const INVARIANCE_TOL: f64 = 1e-10;

struct Ctx<'a> {
    cfg: &'a RunConfig,
    ty: CoxeterType,
    opts: BuildOptions,
    rs: RootSystem,
    strata: Vec<Stratum>,
    basis: InvariantBasis,
}

impl Ctx<'_> {
    fn ks(&self) -> Vec<usize> {
        match (self.cfg.k, &self.cfg.m) {
            (Some(k), _) => vec![k],
            (None, Some(m)) => vec![m.len()],
            (None, None) => (1..self.basis.dim()).collect(),
        }
    }

    /// Explicit `m` when given, otherwise `fibers` seeded regular targets.
    fn targets(&self, k: usize) -> Vec<Vec<f64>> {
        match &self.cfg.m {
            Some(m) => vec![m.clone()],
            None => (0..self.cfg.fibers as u64)
                .map(|i| regular_target(&self.basis, &self.rs, k, self.cfg.seed, i).1)
                .collect(),
        }
    }
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// A failed mathematical check becomes a failing entry; other errors abort.
fn or_failed(name: &str, claim: &str, r: Result<Vec<Check>>) -> Result<Vec<Check>> {
    match r {
        Err(Error::Verification(msg)) => Ok(vec![Check::new(name, claim, Status::Fail).detail(msg)]),
        other => other,
    }
}

fn invariants(cx: &Ctx) -> Result<Vec<Check>> {
    let c = claim(Command::Invariants);
    let b = &cx.basis;
    let degrees_ok = b.degrees() == cx.ty.degrees().as_slice();
    let (exact, invariant, defect) = match cx.rs.simple_reflections_exact() {
        Some(gens) => (true, verify_invariance(b, &gens)?, 0.0),
        None => {
            let d = verify_invariance_f64(b, &cx.rs, 100, cx.cfg.seed);
            (false, d <= INVARIANCE_TOL, d)
        }
    };
    if let (Some(dir), Some(Command::Invariants)) = (&cx.cfg.out, cx.cfg.command) {
        std::fs::create_dir_all(dir)?;
        write_basis_file(&dir.join(format!("{}.json", cx.ty)), b)?;
    }
    Ok(vec![Check::new("invariants", c, status(degrees_ok && invariant))
        .metric("degrees", b.degrees())
        .metric("exact", exact)
        .metric("invariance_defect", defect)
        .metric("sha256", basis_hash(cx.ty, b.degrees(), b.polys()))])
}

fn jacobian(cx: &Ctx) -> Result<Vec<Check>> {
    let c = claim(Command::VerifyJacobian);
    let mut out = or_failed(
        "det-factorization",
        c,
        verify_det_factorization(&cx.basis, &cx.rs).map(|f| {
            vec![Check::new("det-factorization", c, status(f.c != 0.0 && f.degree == cx.rs.len()))
                .metric("c", f.c)
                .metric("c_exact", f.c_exact)
                .metric("exact", f.exact)
                .metric("degree", f.degree)
                .metric("max_rel_dev", f.max_rel_dev)
                .metric("samples", f.samples)]
        }),
    )?;
    let reflections = cx.ty.reflection_count();
    out.push(
        Check::new("root-count", c, status(cx.rs.len() == reflections))
            .metric("positive_roots", cx.rs.len())
            .metric("sum_degrees_minus_one", reflections),
    );
    let order = generate_group_f64(&cx.rs, cx.ty.order())?.len() as u64;
    out.push(
        Check::new("group-order", c, status(order == cx.ty.order()))
            .metric("generated", order)
            .metric("product_of_degrees", cx.ty.order()),
    );
    Ok(out)
}

fn statement(cx: &Ctx) -> Result<Vec<Check>> {
    let c = claim(Command::VerifyStatement);
    let cfg = cx.cfg;
    let reports = verify_statement_33_orderings(
        cx.ty,
        &cx.strata,
        &cx.opts,
        cfg.samples,
        cfg.seed,
        cfg.tol_zero,
        cfg.tol_rank,
    )?;
    Ok(reports
        .into_iter()
        .map(|(order, r)| {
            let mut ch = Check::new(format!("statement-rank:{}", r.stratum), c, status(r.pass))
                .metric("k", r.k)
                .metric("samples", r.samples)
                .metric("max_bordering_minor", r.max_bordering_minor)
                .metric("min_max_k_minor", r.min_max_k_minor)
                .metric("rank_min", r.ranks.iter().min())
                .metric("rank_max", r.ranks.iter().max())
                .witness(r.witness);
            if matches!(cx.ty, CoxeterType::D(_)) {
                ch = ch.metric("d_ordering", order);
            }
            ch
        })
        .collect())
}

fn morse(cx: &Ctx) -> Result<Vec<Check>> {
    let c = claim(Command::Morse);
    let mut out = Vec::new();
    for k in cx.ks() {
        for (i, m) in cx.targets(k).into_iter().enumerate() {
            let r = critical_points(&cx.basis, &cx.rs, &cx.strata, k, &m, cx.cfg.multistarts, cx.cfg.seed)?;
            let min_eig = r
                .points
                .iter()
                .flat_map(|p| p.hessian_eigenvalues.iter().map(|e| e.abs()))
                .fold(f64::INFINITY, f64::min);
            let st = if !r.anomalies.is_empty() {
                Status::Anomaly
            } else {
                status(r.points.iter().all(|p| p.stratum_dim == k) && min_eig >= HESSIAN_GAP)
            };
            let mut ch = Check::new(format!("critical-points:k{k}:{i}"), c, st)
                .metric("target", &m)
                .metric("values", r.points.iter().map(|p| p.value).collect::<Vec<_>>())
                .metric("multipliers", r.points.iter().map(|p| &p.multipliers).collect::<Vec<_>>())
                .metric("strata", r.points.iter().map(|p| &p.stratum).collect::<Vec<_>>())
                .metric("min_abs_hessian_eigenvalue", min_eig.is_finite().then_some(min_eig))
                .metric("converged", r.converged)
                .metric("starts", r.starts)
                .witness(r.anomalies.first().map(|a| a.x.clone()));
            if let Some(a) = r.anomalies.first() {
                ch = ch.detail(format!("{}: {}", a.kind, a.detail));
            }
            out.push(ch);
        }
    }
    Ok(out)
}

fn fiber(cx: &Ctx) -> Result<Vec<Check>> {
    let c = claim(Command::Fiber);
    let cfg = cx.cfg;
    let mut out = Vec::new();
    for k in cx.ks() {
        let (mut nonempty, mut connected) = (0usize, 0usize);
        let mut worst_gap: f64 = 0.0;
        let mut witness = None;
        for (i, m) in cx.targets(k).into_iter().enumerate() {
            let fs = sample_fiber_with(&cx.basis, &cx.rs, k, &m, cfg.fiber_points, cfg.seed.wrapping_add(i as u64), cfg.eps_fiber)?;
            if fs.is_empty() {
                continue;
            }
            nonempty += 1;
            let comps = fiber_connectivity(&fs, connectivity_radius(&fs));
            if comps == 1 {
                connected += 1;
            } else if witness.is_none() {
                witness = Some(m.clone());
            }
            let iv = fiber_value_interval(&fs, &cx.basis)?;
            if iv.max_gap > worst_gap {
                worst_gap = iv.max_gap;
                if worst_gap > MAX_VALUE_GAP {
                    witness = Some(m.clone());
                }
            }
        }
        let share = if nonempty == 0 { 1.0 } else { connected as f64 / nonempty as f64 };
        out.push(
            Check::new(format!("fiber-connectivity:k{k}"), c, status(share >= CONNECTED_SHARE))
                .metric("nonempty", nonempty)
                .metric("connected", connected)
                .metric("share", share),
        );
        out.push(
            Check::new(format!("fiber-interval:k{k}"), c, status(worst_gap <= MAX_VALUE_GAP))
                .metric("max_relative_gap", worst_gap)
                .metric("points", cfg.fiber_points)
                .witness(witness),
        );
    }
    Ok(out)
}

fn write_pairs_csv(path: &Path, r: &RatioReport) -> Result<()> {
    let mut s = String::from("u,v,euclid,geodesic,ratio\n");
    for p in &r.records {
        s.push_str(&format!("{},{},{},{},{}\n", p.u, p.v, p.euclid, p.geodesic, p.ratio));
    }
    std::fs::write(path, s)?;
    Ok(())
}

fn whitney(cx: &Ctx) -> Result<Vec<Check>> {
    let c = claim(Command::Whitney);
    let cfg = cx.cfg;
    let n = cx.basis.dim();
    let h = cfg.pitch(n);
    let r = whitney_study(&cx.basis, &cx.rs, cfg.a, h, cfg.pairs, cfg.seed)?;
    if let Some(p) = &cfg.csv {
        write_pairs_csv(p, &r)?;
    }
    let change = r.refinement_change.unwrap_or(f64::INFINITY);
    let mut out = vec![Check::new(
        "whitney-ratio",
        c,
        status(r.max_ratio.is_finite() && change <= MAX_REFINEMENT_CHANGE),
    )
    .metric("a", cfg.a)
    .metric("h", h)
    .metric("pairs", r.pairs)
    .metric("max_ratio", r.max_ratio)
    .metric("p99_ratio", r.p99_ratio)
    .metric("refinement_change", r.refinement_change)
    .metric("table", &r.table)
    .metric("worst", &r.worst)];

    for s in cx.strata.iter().filter(|s| s.dim >= 1 && s.dim < n) {
        let l = lift_derivatives(&cx.basis, s, cfg.samples, cfg.a, cfg.seed)?;
        let dev = l.scaling.iter().map(|x| x.max_rel_dev).fold(0.0, f64::max);
        let st = if !l.anomalies.is_empty() {
            Status::Anomaly
        } else {
            status(l.sup_norm.is_finite() && dev <= SCALING_AGREEMENT)
        };
        out.push(
            Check::new(format!("lift:{}", s.id), c, st)
                .metric("k", l.k)
                .metric("samples", l.samples.len())
                .metric("sup_norm", l.sup_norm)
                .metric("scaling", &l.scaling)
                .witness(l.anomalies.first().map(|a| a.x.clone())),
        );
    }

    if n >= 2 {
        let mesh = build_chamber_mesh(&cx.rs, cfg.a, h)?;
        for k in 1..n {
            let e = envelope_functions(&cx.basis, &cx.rs, &cx.strata, &mesh, k, cfg.bins)?;
            out.push(
                Check::new(format!("envelope:k{k}"), c, status(e.violations == 0))
                    .metric("points", e.points)
                    .metric("violations", e.violations)
                    .metric("worst_excess", e.worst_excess)
                    .metric("unresolved", e.unresolved)
                    .metric("lipschitz_min", e.lipschitz_min)
                    .metric("lipschitz_max", e.lipschitz_max),
            );
            let ag = envelope_fiber_agreement(&cx.basis, &cx.rs, &cx.strata, k, cfg.fibers, cfg.fiber_points, cfg.seed)?;
            let worst = ag
                .iter()
                .max_by(|a, b| a.deviation.total_cmp(&b.deviation));
            let dev = worst.map_or(0.0, |a| a.deviation) / e.value_range.max(f64::MIN_POSITIVE);
            out.push(
                Check::new(format!("envelope-fiber:k{k}"), c, status(dev <= ENVELOPE_AGREEMENT))
                    .metric("targets", ag.len())
                    .metric("max_relative_deviation", dev)
                    .metric("value_range", e.value_range)
                    .witness(worst.filter(|_| dev > ENVELOPE_AGREEMENT).map(|a| a.target.clone())),
            );
        }
    }
    Ok(out)
}

fn checks(cmd: Command, cx: &Ctx) -> Result<Vec<Check>> {
    match cmd {
        Command::Invariants => invariants(cx),
        Command::VerifyJacobian => jacobian(cx),
        Command::VerifyStatement => statement(cx),
        Command::Morse => morse(cx),
        Command::Fiber => fiber(cx),
        Command::Whitney => whitney(cx),
        Command::All => {
            let mut out = Vec::new();
            for c in [
                Command::Invariants,
                Command::VerifyJacobian,
                Command::VerifyStatement,
                Command::Morse,
                Command::Fiber,
                Command::Whitney,
            ] {
                out.extend(checks(c, cx)?);
            }
            Ok(out)
        }
        Command::Report => unreachable!("handled before building the context"),
    }
}

/// Runs the checks of `cfg.command`. `report` reloads a saved report.
pub fn run_suite(cfg: &RunConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let cmd = cfg.command.expect("validated");
    if cmd == Command::Report {
        let path = cfg.input.as_ref().expect("validated");
        return parse_report(&std::fs::read(path)?);
    }
    let start = Instant::now();
    let ty = cfg.coxeter_type()?;
    let opts = BuildOptions::from_env();
    let rs = build_root_system(ty)?;
    let strata = enumerate_strata(&rs);
    let basis = basic_invariants_with(ty, &opts)?;
    if let Some(m) = &cfg.m {
        if m.is_empty() || m.len() >= basis.dim() {
            return Err(Error::Usage(format!("m needs 1 to {} entries", basis.dim() - 1)));
        }
    }
    if let Some(k) = cfg.k {
        if k == 0 || k >= basis.dim() {
            return Err(Error::Usage(format!("k must lie in 1..{}", basis.dim())));
        }
    }
    let cx = Ctx {
        cfg,
        ty,
        opts,
        rs,
        strata,
        basis,
    };
    let mut report = SuiteReport::empty(cfg.seed);
    report.provenance.ty = Some(ty.to_string());
    report.provenance.command = Some(cmd.name().to_string());
    report.provenance.basis_sha256 = Some(basis_hash(ty, cx.basis.degrees(), cx.basis.polys()));
    report.checks = checks(cmd, &cx)?;
    report.runtime_secs = start.elapsed().as_secs_f64();
    Ok(report)
}
