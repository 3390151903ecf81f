//! Experiment harness: differential verification runs, height-vs-optimum
//! experiments on random and ingested universes, and build/search
//! benchmarks, all emitting CSV.
//!
//! Samples within an experiment are pure given their derived seed, so
//! they run in parallel by default (`parallel` feature) with a
//! sequential fallback; results are identical either way.

use std::sync::Arc;

use crate::error::Error;
use crate::gen::gen_increasing_tree;
use crate::hasse::HasseDiagram;
use crate::opt::{opt_height, opt_lower_bound, SmallTree, OPT_BUDGET};
use crate::rng::Rng;
use crate::trace::Op;
use crate::tree::{Coverage, LineLeafTree};
use crate::universe::{ElementId, UniverseTree, ROOT};
use crate::Result;

/// Shared experiment parameters.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub sizes: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    /// Count each dynamic edge query as two plain comparisons.
    pub double_count: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.iter().any(|&s| s < 2) {
            return Err(Error::Config("sizes must all be at least 2".into()));
        }
        if self.samples < 1 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        Ok(())
    }
}

/// A CSV table with a fixed header.
#[derive(Debug, Clone)]
pub struct Csv {
    pub header: String,
    pub rows: Vec<String>,
}

impl Csv {
    pub fn render(&self) -> String {
        let mut out = self.header.clone();
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }
}

/// Run `count` independent jobs, in parallel when the feature is on.
/// Job outputs depend only on the index, so results are deterministic
/// either way.
pub fn run_samples<T, F>(count: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        run_samples_parallel(count, job)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_samples_sequential(count, job)
    }
}

pub fn run_samples_sequential<T, F>(count: usize, job: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(job).collect()
}

#[cfg(feature = "parallel")]
pub fn run_samples_parallel<T, F>(count: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(job).collect()
}

fn sample_seed(seed: u64, size: usize, sample: usize) -> u64 {
    let mut r = Rng::new(seed ^ (size as u64).wrapping_mul(0x9e37_79b9));
    r.next_u64() ^ (sample as u64).wrapping_mul(0x85eb_ca6b_c2b2_ae35)
}

#[derive(Debug, Clone, Copy)]
pub struct HeightRow {
    pub n: usize,
    pub sample: usize,
    pub h_llt: u64,
    pub opt: u64,
    pub opt_exact: bool,
    pub ratio: f64,
}

fn height_row(tree: &LineLeafTree, n: usize, sample: usize, double: bool) -> HeightRow {
    let metrics = tree.metrics_sampled(double, Some(4096), 7);
    let (opt, opt_exact) = if tree.len() <= OPT_BUDGET {
        let ids: Vec<ElementId> = tree.hasse().members().collect();
        let index = |x: ElementId| ids.iter().position(|&v| v == x).unwrap();
        let edges: Vec<(usize, usize)> = tree
            .hasse()
            .members()
            .filter_map(|v| tree.hasse().pred(v).map(|p| (index(p), index(v))))
            .collect();
        let t = SmallTree::new(ids.len(), edges);
        (opt_height(&t).expect("within budget").height as u64, true)
    } else {
        (opt_lower_bound(metrics.max_degree, metrics.n) as u64, false)
    };
    HeightRow {
        n,
        sample,
        h_llt: metrics.h,
        opt,
        opt_exact,
        ratio: metrics.h as f64 / opt.max(1) as f64,
    }
}

/// Heights on uniform random tree-like orders: the member set is the
/// whole sampled universe.
pub fn run_experiment1(cfg: &ExperimentConfig) -> Result<(Csv, Vec<HeightRow>)> {
    cfg.validate()?;
    let mut all = Vec::new();
    for &n in &cfg.sizes {
        let rows = run_samples(cfg.samples, |s| {
            let uni = Arc::new(gen_increasing_tree(n, sample_seed(cfg.seed, n, s)));
            let members: Vec<ElementId> = (1..n).collect();
            let h = HasseDiagram::from_members(uni, &members).expect("valid members");
            let tree = LineLeafTree::build_static(h).expect("build succeeds");
            height_row(&tree, n, s, cfg.double_count)
        });
        all.extend(rows);
    }
    Ok((height_csv(&all), all))
}

/// Heights on member sets sampled without replacement from a fixed
/// (typically ingested) universe; the minimal element is always forced.
pub fn run_experiment2(
    cfg: &ExperimentConfig,
    universe: &Arc<UniverseTree>,
) -> Result<(Csv, Vec<HeightRow>)> {
    cfg.validate()?;
    let m = universe.len();
    let mut all = Vec::new();
    for &size in &cfg.sizes {
        let n = size.min(m);
        let rows = run_samples(cfg.samples, |s| {
            let mut rng = Rng::new(sample_seed(cfg.seed, n, s));
            // partial Fisher-Yates over element ids 1..m
            let mut pool: Vec<ElementId> = (1..m).collect();
            let take = (n - 1).min(pool.len());
            for i in 0..take {
                let j = i + rng.usize_below(pool.len() - i);
                pool.swap(i, j);
            }
            let members: Vec<ElementId> = pool[..take].to_vec();
            let h = HasseDiagram::from_members(universe.clone(), &members).expect("valid members");
            let tree = LineLeafTree::build_static(h).expect("build succeeds");
            height_row(&tree, n, s, cfg.double_count)
        });
        all.extend(rows);
    }
    Ok((height_csv(&all), all))
}

fn height_csv(rows: &[HeightRow]) -> Csv {
    Csv {
        header: "n,sample,h_llt,opt,ratio".to_string(),
        rows: rows
            .iter()
            .map(|r| format!("{},{},{},{},{:.4}", r.n, r.sample, r.h_llt, r.opt, r.ratio))
            .collect(),
    }
}

/// Build/search benchmark rows.
pub fn run_bench(cfg: &ExperimentConfig) -> Result<Csv> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &n in &cfg.sizes {
        let out = run_samples(cfg.samples, |s| {
            let uni = Arc::new(gen_increasing_tree(n, sample_seed(cfg.seed, n, s)));
            let members: Vec<ElementId> = (1..n).collect();
            let h = HasseDiagram::from_members(uni, &members).expect("valid members");
            let t0 = std::time::Instant::now();
            let tree = LineLeafTree::build_static(h).expect("build succeeds");
            let build_ms = t0.elapsed().as_secs_f64() * 1e3;
            let t1 = std::time::Instant::now();
            let mut total_q = 0u64;
            let probes = n.min(2048);
            for u in 0..probes {
                let (_, stats) = tree.search_with_stats(u).expect("valid element");
                total_q += stats.queries;
            }
            let search_ms = t1.elapsed().as_secs_f64() * 1e3;
            (
                tree.counters.structure_ops,
                build_ms,
                total_q as f64 / probes as f64,
                search_ms,
            )
        });
        for (s, (ops, build_ms, mean_q, search_ms)) in out.into_iter().enumerate() {
            rows.push(format!(
                "{n},{s},{ops},{build_ms:.3},{mean_q:.2},{search_ms:.3}"
            ));
        }
    }
    Ok(Csv {
        header: "n,sample,build_ops,build_ms,mean_search_queries,search_ms".to_string(),
        rows,
    })
}

/// Verification workload parameters.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub traces: usize,
    pub max_m: usize,
    pub ops_per_trace: usize,
    pub seed: u64,
    /// Interleave traces on wider universes so the rarer correction
    /// cases get exercised; part of the default workload.
    pub widen: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            traces: 300,
            max_m: 24,
            ops_per_trace: 60,
            seed: 0x11e7,
            widen: true,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub traces: usize,
    pub mutations: u64,
    pub queries: u64,
    pub oracle_checks: u64,
    pub violations: Vec<String>,
    pub coverage: Coverage,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "traces={} mutations={} queries={} oracle_checks={} violations={}\n",
            self.traces,
            self.mutations,
            self.queries,
            self.oracle_checks,
            self.violations.len()
        );
        out.push_str("case coverage:\n");
        for (name, hits) in self.coverage.entries() {
            out.push_str(&format!("  {name}: {hits}\n"));
        }
        for v in self.violations.iter().take(5) {
            out.push_str(&format!("violation: {v}\n"));
        }
        out
    }
}

/// Replay random traces, checking after every mutation that the
/// structure audits pass and that it equals a static rebuild; search
/// audits run on every query, and the fast edge query is spot-checked
/// against the brute-force oracle.
pub fn run_verify(cfg: &VerifyConfig) -> VerifyReport {
    let results: Vec<(u64, u64, u64, Vec<String>, Coverage)> = run_samples(cfg.traces, |trace| {
        let mut violations = Vec::new();
        let mut rng = Rng::new(cfg.seed ^ (trace as u64).wrapping_mul(0xa076_1d64_78bd_642f));
        let widen = cfg.widen && trace % 2 == 1;
        let span = if widen { cfg.max_m.max(48) } else { cfg.max_m };
        let m = 2 + rng.usize_below(span.saturating_sub(1).max(1));
        let uni = Arc::new(gen_increasing_tree(m, rng.next_u64()));
        let h = HasseDiagram::from_members(uni.clone(), &[]).expect("empty set");
        let mut tree = LineLeafTree::build_static(h).expect("singleton build");
        let mut members: Vec<ElementId> = Vec::new();
        let mut mutations = 0u64;
        let mut queries = 0u64;
        let mut oracle_checks = 0u64;
        for opi in 0..cfg.ops_per_trace {
            let roll = rng.f64();
            let op = if roll < 0.5 {
                let free: Vec<ElementId> = (1..m).filter(|v| !members.contains(v)).collect();
                if free.is_empty() {
                    continue;
                }
                Op::Insert(free[rng.usize_below(free.len())])
            } else if roll < 0.8 {
                if members.is_empty() {
                    continue;
                }
                Op::Delete(members[rng.usize_below(members.len())])
            } else {
                Op::Query(rng.usize_below(m))
            };
            let context = format!("trace {trace} op {opi} ({op:?})");
            match op {
                Op::Insert(a) => {
                    if let Err(e) = tree.insert(a) {
                        violations.push(format!("{context}: {e}"));
                        break;
                    }
                    members.push(a);
                    mutations += 1;
                }
                Op::Delete(a) => {
                    if let Err(e) = tree.delete(a) {
                        violations.push(format!("{context}: {e}"));
                        break;
                    }
                    members.retain(|&v| v != a);
                    mutations += 1;
                }
                Op::Query(u) => {
                    queries += 1;
                    match tree.search_with_stats(u) {
                        Ok((out, stats)) => {
                            if let Err(e) = LineLeafTree::audit_search(&stats) {
                                violations.push(format!("{context}: {e}"));
                            }
                            let found =
                                matches!(out, crate::tree::SearchOutcome::Found(x) if x == u);
                            let expect = u == ROOT || members.contains(&u);
                            if found != expect {
                                violations.push(format!("{context}: wrong membership"));
                            }
                        }
                        Err(e) => violations.push(format!("{context}: {e}")),
                    }
                    continue;
                }
            }
            if let Err(e) = tree.check_structure() {
                violations.push(format!("{context}: {e}"));
                break;
            }
            let (ok, report) = tree.check_rebuild();
            if !ok {
                violations.push(format!("{context}: {report}"));
                break;
            }
            // edge-query oracle agreement on sampled triples
            if !members.is_empty() {
                let mut all: Vec<ElementId> = vec![ROOT];
                all.extend(members.iter().copied());
                for _ in 0..4 {
                    let x = all[rng.usize_below(all.len())];
                    let y = all[rng.usize_below(all.len())];
                    if x == y {
                        continue;
                    }
                    let u = rng.usize_below(m);
                    oracle_checks += 1;
                    let fast = crate::query::edge_query_fast(tree.hasse(), x, y, u);
                    let brute = crate::query::edge_query_brute(tree.hasse(), x, y, u);
                    match (fast, brute) {
                        (Ok(f), Ok(b)) if f == b => {}
                        other => {
                            violations.push(format!("{context}: oracle disagreement {other:?}"))
                        }
                    }
                }
            }
        }
        (mutations, queries, oracle_checks, violations, tree.coverage.clone())
    });

    let mut report = VerifyReport {
        traces: cfg.traces,
        ..Default::default()
    };
    for (mutations, queries, oracle_checks, violations, coverage) in results {
        report.mutations += mutations;
        report.queries += queries;
        report.oracle_checks += oracle_checks;
        report.violations.extend(violations);
        report.coverage.merge(&coverage);
    }
    report
}

/// Least-squares fit of `y` against `x`; returns (slope, intercept, r²).
pub fn affine_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let slope = if denom.abs() < 1e-12 {
        0.0
    } else {
        (n * sxy - sx * sy) / denom
    };
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    let r2 = if ss_tot.abs() < 1e-12 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    (slope, intercept, r2)
}

/// Minimal line-chart SVG for quick looks at experiment output. Not part
/// of any acceptance surface.
pub fn emit_svg(series: &[(&str, Vec<(f64, f64)>)]) -> String {
    let (w, h, pad) = (640.0, 400.0, 40.0);
    let all: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, pts)| pts.iter().copied())
        .collect();
    if all.is_empty() {
        return String::from("<svg xmlns=\"http://www.w3.org/2000/svg\"/>");
    }
    let (x0, x1) = all
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (y0, y1) = all
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let sx = |x: f64| pad + (x - x0) / (x1 - x0).max(1e-9) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0).max(1e-9) * (h - 2.0 * pad);
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    );
    out.push_str(&format!(
        "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    ));
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = colors[i % colors.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            path.join(" ")
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" fill=\"{color}\" font-size=\"12\">{name}</text>\n",
            pad + 4.0,
            pad + 14.0 * (i as f64 + 1.0)
        ));
    }
    out.push_str("</svg>\n");
    out
}
