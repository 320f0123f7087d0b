//! Benchmark suites. Each writes CSV to the main output and fails with exit
//! code 1 when any row fails its bound check.

use anyhow::anyhow;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use whitehead_core::fit::least_squares;
use whitehead_core::graph::{cheeger, cheeger_sampled, make_bouquet_graph, make_line_graph, MarkedGraph, MAX_EXACT_CHEEGER_EDGES};
use whitehead_core::metric::{lipschitz_pipeline, random_thick_graph, LipschitzCertificate, DEFAULT_MOVE_CONSTANT};
use whitehead_core::oracle::{ball_growth, Metric};
use whitehead_core::rebalance::{reduce_height, round_budget};
use whitehead_core::sort::{build_tn, sort};
use whitehead_core::tree::{random_tree, tree_count};

use crate::commands::{move_bound, pass, Failure};
use crate::{Cli, Suite};

pub struct Options {
    pub count: usize,
    pub min_exp: u32,
    pub max_exp: u32,
    pub n: usize,
    pub metric: Metric,
}

/// Largest exponent for sort-scaling without `--guard-override`.
pub const MAX_SORT_EXP: u32 = 20;
/// Samples for the Cheeger upper bound above the exact size limit.
pub const CHEEGER_SAMPLES: usize = 20_000;
/// Slope limit for `log_total` against `ln(n / eps)`.
pub const LIPSCHITZ_SLOPE_LIMIT: f64 = 10.0;

type Row = Vec<String>;

pub fn run(cli: &Cli, suite: Suite, opts: &Options) -> Result<(), Failure> {
    let (header, rows, summary) = match suite {
        Suite::SortScaling => sort_scaling(cli, opts)?,
        Suite::BallGrowth => ball_growth_rows(cli, opts)?,
        Suite::CheegerSweep => cheeger_sweep(cli)?,
        Suite::LipschitzSweep => lipschitz_sweep(cli)?,
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Check(e.into());
    w.write_record(&header).map_err(io)?;
    let pass_col = header.iter().position(|h| *h == "pass");
    let mut failed = 0;
    for row in &rows {
        w.write_record(row).map_err(io)?;
        if pass_col.is_some_and(|c| row[c] == "FAIL") {
            failed += 1;
        }
    }
    let bytes = w.into_inner().map_err(|e| Failure::Check(anyhow!("{e}")))?;
    cli.emit(&String::from_utf8(bytes).expect("csv output is utf-8"))?;
    let mut ok = failed == 0;
    if let Some((line, good)) = summary {
        eprintln!("{line}");
        ok &= good;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Check(anyhow!("{failed} of {} rows failed their bound check", rows.len())))
    }
}

type SuiteOutput = (Vec<&'static str>, Vec<Row>, Option<(String, bool)>);

/// Per-instance RNG: the seed plus the instance index, on a stream keyed
/// by the size so different sizes never share draws.
pub fn instance_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sort_scaling(cli: &Cli, opts: &Options) -> Result<SuiteOutput, Failure> {
    if opts.max_exp > MAX_SORT_EXP && !cli.guard_override {
        return Err(Failure::Input(anyhow!("max exponent {} exceeds {MAX_SORT_EXP}; pass --guard-override", opts.max_exp)));
    }
    if opts.min_exp > opts.max_exp {
        return Err(Failure::Input(anyhow!("empty exponent range {}..={}", opts.min_exp, opts.max_exp)));
    }
    let exec = cli.exec();
    let mut rows = Vec::new();
    for k in (opts.min_exp..=opts.max_exp).step_by(2) {
        let n = 1usize << k;
        let batch = exec.map_range(opts.count, |i| {
            let seed = cli.seed.wrapping_add(i as u64);
            let t = random_tree(n, &mut instance_rng(seed, n as u64));
            let bound = move_bound(n);
            let (reduce_rounds, sort_rounds, moves, ok) = match reduce_height(&t) {
                Ok(r) => match sort(&r.tree) {
                    Ok(s) => {
                        let moves = r.moves.iter().filter(|m| !m.is_empty()).count() + s.sim_moves();
                        let ok = r.rounds <= round_budget(n)
                            && s.rounds as i64 <= s.budget
                            && moves as f64 <= bound
                            && s.tree == build_tn(n);
                        (r.rounds.to_string(), s.rounds.to_string(), moves.to_string(), ok)
                    }
                    Err(e) => {
                        log::warn!("n={n} seed={seed}: {e}");
                        (r.rounds.to_string(), String::new(), String::new(), false)
                    }
                },
                Err(e) => {
                    log::warn!("n={n} seed={seed}: {e}");
                    (String::new(), String::new(), String::new(), false)
                }
            };
            vec![n.to_string(), seed.to_string(), reduce_rounds, sort_rounds, moves, format!("{bound:.3}"), pass(ok).to_string()]
        });
        rows.extend(batch);
    }
    let header = vec!["n", "seed", "reduce_rounds", "sort_rounds", "total_sim_moves", "bound", "pass"];
    Ok((header, rows, None))
}

fn ball_growth_rows(cli: &Cli, opts: &Options) -> Result<SuiteOutput, Failure> {
    if cli.guard_override {
        return Err(Failure::Input(anyhow!("--guard-override is refused for exact oracle queries")));
    }
    let n = opts.n;
    let balls = ball_growth(n, None, opts.metric)?;
    let total = tree_count(n);
    let mut rows = Vec::new();
    let mut prev = 0usize;
    for &(r, size) in &balls {
        let last = r + 1 == balls.len();
        let ok = size >= prev && (size as u128) <= total && (!last || size as u128 == total);
        prev = size;
        rows.push(vec![
            n.to_string(),
            opts.metric.to_string(),
            r.to_string(),
            size.to_string(),
            format!("{:.6}", (size as f64).log2()),
            total.to_string(),
            pass(ok).to_string(),
        ]);
    }
    let header = vec!["n", "metric", "r", "ball_size", "log2_ball_size", "tree_count", "pass"];
    Ok((header, rows, None))
}

fn cheeger_sweep(cli: &Cli) -> Result<SuiteOutput, Failure> {
    let mut jobs: Vec<(&'static str, usize, usize)> = Vec::new();
    for k in 2..=64usize {
        for g in 0..=k {
            let p = k - g;
            if 2 * g + p <= 2 {
                continue;
            }
            jobs.push(("line", g, p));
            jobs.push(("bouquet", g, p));
        }
    }
    let build = |&(kind, g, p): &(&'static str, usize, usize)| -> Result<MarkedGraph, Failure> {
        Ok(if kind == "line" { make_line_graph(g, p)? } else { make_bouquet_graph(g, p)? })
    };
    let mut selected = Vec::new();
    for job in jobs {
        let m = build(&job)?;
        let edges = m.graph().edge_count();
        if edges < 2 || (edges > MAX_EXACT_CHEEGER_EDGES && !cli.guard_override) {
            continue;
        }
        selected.push((job, m));
    }
    let seed = cli.seed;
    let rows = cli.exec().map(&selected, |((kind, g, p), m)| -> Result<Row, Failure> {
        let edges = m.graph().edge_count();
        let value = if edges <= MAX_EXACT_CHEEGER_EDGES {
            cheeger(m.graph())?
        } else {
            cheeger_sampled(m.graph(), CHEEGER_SAMPLES, &mut instance_rng(seed, (g << 32 | p) as u64))?
        };
        let bound = 4.0 / (g + p) as f64;
        let (bound_col, ok) = if *kind == "line" {
            (format!("{bound:.6}"), pass(value.value.to_f64() <= bound + 1e-12).to_string())
        } else {
            (String::new(), "-".to_string())
        };
        Ok(vec![
            kind.to_string(),
            g.to_string(),
            p.to_string(),
            edges.to_string(),
            value.value.to_string(),
            format!("{:.6}", value.value.to_f64()),
            value.exact.to_string(),
            bound_col,
            ok,
        ])
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let header = vec!["kind", "g", "p", "edges", "cheeger", "cheeger_f64", "exact", "bound", "pass"];
    Ok((header, rows, None))
}

/// Ranks and thickness values of the default sweep.
pub const LIPSCHITZ_RANKS: [usize; 5] = [4, 8, 16, 32, 64];
pub const LIPSCHITZ_EPS: [f64; 3] = [0.5, 0.1, 0.01];

fn lipschitz_sweep(cli: &Cli) -> Result<SuiteOutput, Failure> {
    let cases: Vec<(usize, f64)> = LIPSCHITZ_RANKS.iter().flat_map(|&n| LIPSCHITZ_EPS.iter().map(move |&e| (n, e))).collect();
    let seed = cli.seed;
    let results = cli.exec().map_range(cases.len(), |i| -> Result<LipschitzCertificate, Failure> {
        let (n, eps) = cases[i];
        let mut rng = instance_rng(seed, i as u64);
        let g = random_thick_graph(n, eps, &mut rng)?;
        let h = random_thick_graph(n, eps, &mut rng)?;
        Ok(lipschitz_pipeline(&g, &h, eps, DEFAULT_MOVE_CONSTANT)?)
    });
    let certs = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut header: Vec<&'static str> = LipschitzCertificate::CSV_HEADER.to_vec();
    header.extend(["moves", "diameter", "pass"]);
    let rows = certs
        .iter()
        .map(|c| {
            let mut row: Row = c.csv_row().to_vec();
            row.extend([c.moves.to_string(), c.diameter.to_string(), pass(c.holds()).to_string()]);
            row
        })
        .collect();
    let points: Vec<(f64, f64)> = certs.iter().map(|c| ((c.n as f64 / c.eps).ln(), c.log_total)).collect();
    let summary = least_squares(&points).map(|fit| {
        let ok = fit.slope <= LIPSCHITZ_SLOPE_LIMIT;
        (format!("slope of log_total against ln(n/eps): {:.4} (limit {LIPSCHITZ_SLOPE_LIMIT}) {}", fit.slope, pass(ok)), ok)
    });
    Ok((header, rows, summary))
}
