use lltree::exp::{affine_fit, run_experiment1, ExperimentConfig};
use lltree::gen::{gen_tight_family, tight_family_size};
use lltree::hasse::HasseDiagram;
use lltree::opt::{opt_height, opt_lower_bound, SmallTree, OPT_BUDGET};
use lltree::LineLeafTree;
use std::sync::Arc;

fn main() {
    let t0 = std::time::Instant::now();
    // criterion 9 dry run
    let cfg = ExperimentConfig {
        sizes: vec![16, 32, 64, 128, 256, 512, 1024],
        samples: 100,
        seed: 20260808,
        double_count: true,
    };
    let (_, rows) = run_experiment1(&cfg).unwrap();
    let mut pts_h = Vec::new();
    let mut pts_o = Vec::new();
    for &n in &cfg.sizes {
        let rs: Vec<_> = rows.iter().filter(|r| r.n == n).collect();
        let mean_h: f64 = rs.iter().map(|r| r.h_llt as f64).sum::<f64>() / rs.len() as f64;
        let mean_o: f64 = rs.iter().map(|r| r.opt as f64).sum::<f64>() / rs.len() as f64;
        let mean_ratio: f64 = rs.iter().map(|r| r.ratio).sum::<f64>() / rs.len() as f64;
        println!("n={n}: mean_h={mean_h:.2} mean_opt={mean_o:.2} mean_ratio={mean_ratio:.3}");
        pts_h.push(((n as f64).log2(), mean_h));
        pts_o.push(((n as f64).log2(), mean_o));
    }
    let (s1, _, r2h) = affine_fit(&pts_h);
    let (s2, _, r2o) = affine_fit(&pts_o);
    println!("fit h: slope={s1:.3} r2={r2h:.4}; fit opt: slope={s2:.3} r2={r2o:.4}");
    println!("exp1 elapsed {:?}", t0.elapsed());

    // criterion 6 dry run
    let mut prev = 0.0;
    for k in 2..=6 {
        let (uni, _) = gen_tight_family(k);
        let n = uni.len();
        assert_eq!(n, tight_family_size(k));
        let members: Vec<usize> = (1..n).collect();
        let h = HasseDiagram::from_members(Arc::new(uni), &members).unwrap();
        let tree = LineLeafTree::build_static(h).unwrap();
        let m = tree.metrics(false);
        let opt = if n <= OPT_BUDGET {
            let ids: Vec<usize> = tree.hasse().members().collect();
            let idx = |x: usize| ids.iter().position(|&v| v == x).unwrap();
            let edges: Vec<(usize, usize)> = tree.hasse().members()
                .filter_map(|v| tree.hasse().pred(v).map(|p| (idx(p), idx(v)))).collect();
            opt_height(&SmallTree::new(ids.len(), edges)).unwrap().height as u64
        } else {
            opt_lower_bound(m.max_degree, m.n) as u64
        };
        let ratio = m.h as f64 / opt as f64;
        println!("tight k={k}: n={n} h={} opt={opt} ratio={ratio:.3} (prev {prev:.3})", m.h);
        prev = ratio;
    }
    println!("total elapsed {:?}", t0.elapsed());
}
