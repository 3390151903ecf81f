//! Workbench CLI: generators, builds, trace dumps, differential
//! verification, experiments and benchmarks for the line-leaf tree.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use lltree::exp::{
    emit_svg, run_bench, run_experiment1, run_experiment2, run_verify, Csv, ExperimentConfig,
    VerifyConfig,
};
use lltree::gen::{gen_increasing_tree, gen_tight_family};
use lltree::hasse::HasseDiagram;
use lltree::ingest::ingest_filesystem;
use lltree::trace::{parse_ops, Op};
use lltree::universe::UniverseTree;
use lltree::{Error, LineLeafTree};

#[derive(Parser)]
#[command(name = "llt", about = "Dynamic search trees over tree-like partial orders", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a universe file.
    Gen(GenArgs),
    /// Build the search structure and print its shape metrics.
    Build(BuildArgs),
    /// Build and dump one line per contraction event.
    Trace(BuildArgs),
    /// Replay randomized traces, checking every invariant after every
    /// operation; exits nonzero on any violation.
    Verify(VerifyArgs),
    /// Heights versus the static optimum on random tree-like orders.
    Experiment1(ExpArgs),
    /// Heights versus the static optimum on member sets sampled from a
    /// fixed universe.
    Experiment2(Exp2Args),
    /// Build and search timings with operation counters.
    Bench(ExpArgs),
    /// Crawl a directory into a universe file.
    IngestFs(IngestArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Kind of universe: `increasing` or `tight`.
    kind: String,
    /// Node count (increasing) or growth steps (tight).
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    /// Universe file (`M`, then `child parent` lines).
    #[arg(long)]
    universe: PathBuf,
    /// Optional op-trace file (`I/D/Q <id>` lines) replayed from the
    /// empty set; without it the whole universe is the member set.
    #[arg(long)]
    ops: Option<PathBuf>,
    /// Check rebuild equivalence after every replayed operation.
    #[arg(long, default_value_t = false)]
    check: bool,
    /// Count each dynamic edge query as two comparisons in the metrics.
    #[arg(long, default_value_t = false)]
    double_count: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 300)]
    traces: usize,
    #[arg(long, default_value_t = 24)]
    max_m: usize,
    #[arg(long, default_value_t = 60)]
    ops: usize,
    #[arg(long, default_value_t = 0x11e7)]
    seed: u64,
}

#[derive(Args)]
struct ExpArgs {
    /// Comma-separated sizes.
    #[arg(long, value_delimiter = ',', default_values_t = vec![16, 32, 64, 128, 256, 512, 1024])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = false)]
    double_count: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG line chart next to the CSV.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct Exp2Args {
    /// Universe file to sample member sets from.
    #[arg(long)]
    universe: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = vec![100, 1000, 10000])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = false)]
    double_count: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    /// Directory to crawl.
    #[arg(long)]
    path: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> lltree::Result<ExitCode> {
    match cli.command {
        Command::Gen(args) => {
            let tree = match args.kind.as_str() {
                "increasing" => gen_increasing_tree(args.n.max(1), args.seed),
                "tight" => gen_tight_family(args.n.max(1)).0,
                other => {
                    return Err(Error::Config(format!(
                        "unknown generator {other:?}; use increasing or tight"
                    )))
                }
            };
            write_or_print(args.out.as_deref(), &tree.render())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Build(args) => {
            let (tree, _) = load_and_build(&args)?;
            let m = tree.metrics_sampled(args.double_count, Some(4096), 7);
            println!(
                "n={} h={} w={} max_degree={} diameter={} rounds={}",
                m.n, m.h, m.w, m.max_degree, m.diameter, m.rounds
            );
            println!(
                "edge_queries={} comparisons={} structure_ops={}",
                tree.counters.edge_queries, tree.counters.comparisons, tree.counters.structure_ops
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Trace(args) => {
            let (tree, replayed) = load_and_build(&args)?;
            // the dump reflects a fresh static contraction of the final set
            let (_, events) = LineLeafTree::build_static_traced(tree.hasse().clone())?;
            for e in &events {
                println!("{}", e.render());
            }
            if replayed {
                eprintln!("# contraction of the set reached after replaying the trace");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let report = run_verify(&VerifyConfig {
                traces: args.traces,
                max_m: args.max_m,
                ops_per_trace: args.ops,
                seed: args.seed,
                widen: true,
            });
            print!("{}", report.render());
            if report.ok() {
                println!("verify: PASS");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("verify: FAIL");
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Experiment1(args) => {
            let cfg = exp_config(&args);
            let (csv, rows) = run_experiment1(&cfg)?;
            if rows.iter().any(|r| !r.opt_exact) {
                eprintln!(
                    "note: opt column holds the degree/log lower bound for n > {}",
                    lltree::opt::OPT_BUDGET
                );
            }
            write_or_print(args.out.as_deref(), &csv.render())?;
            if let Some(svg) = &args.svg {
                write_svg(svg, &csv)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Experiment2(args) => {
            let text = std::fs::read_to_string(&args.universe)
                .map_err(|e| Error::io(format!("reading {}", args.universe.display()), e))?;
            let uni = Arc::new(UniverseTree::parse(&text)?);
            let cfg = ExperimentConfig {
                sizes: args.sizes,
                samples: args.samples,
                seed: args.seed,
                double_count: args.double_count,
            };
            let (csv, _) = run_experiment2(&cfg, &uni)?;
            write_or_print(args.out.as_deref(), &csv.render())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench(args) => {
            let cfg = exp_config(&args);
            let csv = run_bench(&cfg)?;
            write_or_print(args.out.as_deref(), &csv.render())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::IngestFs(args) => {
            let (tree, stats) = ingest_filesystem(&args.path)?;
            println!("{}", stats.render());
            write_or_print(args.out.as_deref(), &tree.render())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn exp_config(args: &ExpArgs) -> ExperimentConfig {
    ExperimentConfig {
        sizes: args.sizes.clone(),
        samples: args.samples,
        seed: args.seed,
        double_count: args.double_count,
    }
}

fn load_and_build(args: &BuildArgs) -> lltree::Result<(LineLeafTree, bool)> {
    let text = std::fs::read_to_string(&args.universe)
        .map_err(|e| Error::io(format!("reading {}", args.universe.display()), e))?;
    let uni = Arc::new(UniverseTree::parse(&text)?);
    match &args.ops {
        None => {
            let members: Vec<usize> = (1..uni.len()).collect();
            let h = HasseDiagram::from_members(uni, &members)?;
            Ok((LineLeafTree::build_static(h)?, false))
        }
        Some(path) => {
            let ops_text = std::fs::read_to_string(path)
                .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
            let ops = parse_ops(&ops_text)?;
            let h = HasseDiagram::new(uni);
            let mut tree = LineLeafTree::build_static(h)?;
            for (i, op) in ops.iter().enumerate() {
                match *op {
                    Op::Insert(id) => tree.insert(id)?,
                    Op::Delete(id) => tree.delete(id)?,
                    Op::Query(id) => {
                        let member = tree.test_membership(id)?;
                        println!("Q {id} -> {member}");
                    }
                }
                if args.check && !matches!(op, Op::Query(_)) {
                    let (ok, report) = tree.check_rebuild();
                    if !ok {
                        return Err(Error::Corrupt(format!(
                            "rebuild mismatch after op {i}: {report}"
                        )));
                    }
                }
            }
            Ok((tree, true))
        }
    }
}

fn write_or_print(path: Option<&std::path::Path>, text: &str) -> lltree::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Error::io(format!("writing {}", p.display()), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_svg(path: &std::path::Path, csv: &Csv) -> lltree::Result<()> {
    // average the h_llt and opt columns per size
    let mut by_n: Vec<(usize, f64, f64, usize)> = Vec::new();
    for row in &csv.rows {
        let mut it = row.split(',');
        let n: usize = it.next().unwrap().parse().unwrap_or(0);
        let _sample = it.next();
        let h: f64 = it.next().unwrap().parse().unwrap_or(0.0);
        let opt: f64 = it.next().unwrap().parse().unwrap_or(0.0);
        match by_n.iter_mut().find(|e| e.0 == n) {
            Some(e) => {
                e.1 += h;
                e.2 += opt;
                e.3 += 1;
            }
            None => by_n.push((n, h, opt, 1)),
        }
    }
    let hs: Vec<(f64, f64)> = by_n
        .iter()
        .map(|&(n, h, _, c)| ((n as f64).log2(), h / c as f64))
        .collect();
    let opts: Vec<(f64, f64)> = by_n
        .iter()
        .map(|&(n, _, o, c)| ((n as f64).log2(), o / c as f64))
        .collect();
    let svg = emit_svg(&[("search height", hs), ("optimum", opts)]);
    std::fs::write(path, svg).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}
