use std::fmt::Write as _;
use std::path::Path;

use anyhow::anyhow;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use whitehead_core::graph::{make_bouquet_graph, make_line_graph, random_marked_graph, GraphError};
use whitehead_core::metric::{random_thick_graph, MetricError};
use whitehead_core::oracle::{exact_distance, Metric, OracleError};
use whitehead_core::rebalance::{reduce_height, round_budget, RebalanceError};
use whitehead_core::rewriting::MoveScript;
use whitehead_core::sort::{build_tn, distance_upper, sort, Normalization, SortError};
use whitehead_core::tree::{caterpillar, random_tree};
use whitehead_core::LabeledTree;

use crate::input::{read_file, read_tree, write_file};
use crate::{bench, Cli, Command, GenKind};

/// Largest tree complexity `gen` produces without `--guard-override`.
pub const MAX_GEN_TREE: usize = 1 << 20;
/// Largest `g + p` for generated graphs without `--guard-override`.
pub const MAX_GEN_GRAPH: usize = 1 << 14;

#[derive(Debug)]
pub enum Failure {
    /// Bad input or a refused request; exit code 2.
    Input(anyhow::Error),
    /// A bound or invariant check failed; exit code 1.
    Check(anyhow::Error),
}

impl From<SortError> for Failure {
    fn from(e: SortError) -> Self {
        match e {
            SortError::Precondition(_) | SortError::ComplexityMismatch(..) => Failure::Input(e.into()),
            _ => Failure::Check(e.into()),
        }
    }
}

impl From<RebalanceError> for Failure {
    fn from(e: RebalanceError) -> Self {
        Failure::Check(e.into())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Guard { .. } => Failure::Input(anyhow!("{e}; use --upper for a constructive bound")),
            OracleError::Unreachable(_) => Failure::Check(e.into()),
            _ => Failure::Input(e.into()),
        }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Params(_) | GraphError::Parse { .. } | GraphError::SizeGuard(_) | GraphError::TooFewEdges(_) => Failure::Input(e.into()),
            _ => Failure::Check(e.into()),
        }
    }
}

impl From<MetricError> for Failure {
    fn from(e: MetricError) -> Self {
        match e {
            MetricError::Graph(g) => g.into(),
            MetricError::Invariant(_) | MetricError::Sort(_) | MetricError::Move(_) => Failure::Check(e.into()),
            _ => Failure::Input(e.into()),
        }
    }
}

pub fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// `40 log2 n`, the budget on simultaneous moves from any tree to `T_n`.
pub fn move_bound(n: usize) -> f64 {
    40.0 * (n.max(2) as f64).log2()
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Sort { tree, script, trace } => cmd_sort(cli, tree, script.as_deref(), trace.as_deref()),
        Command::Distance { tree1, tree2, metric, exact, upper: _, script } => {
            cmd_distance(cli, tree1, tree2, (*metric).into(), *exact, script.as_deref())
        }
        Command::Gen { kind, params, eps } => cmd_gen(cli, *kind, params, *eps),
        Command::Bench { suite, count, min_exp, max_exp, n, metric } => {
            let opts = bench::Options { count: *count, min_exp: *min_exp, max_exp: *max_exp, n: *n, metric: (*metric).into() };
            bench::run(cli, *suite, &opts)
        }
        Command::Replay { tree, script } => cmd_replay(cli, tree, script),
    }
}

fn cmd_sort(cli: &Cli, arg: &str, script: Option<&Path>, trace: Option<&Path>) -> Result<(), Failure> {
    let t = read_tree(arg)?;
    let n = t.complexity();
    let reduction = reduce_height(&t)?;
    let sorting = sort(&reduction.tree)?;
    let norm = Normalization { reduction, sorting };
    let reduce_budget = round_budget(n);
    let reduce_ok = n <= 1 || norm.reduction.rounds <= reduce_budget;
    let sort_ok = norm.sorting.rounds as i64 <= norm.sorting.budget.max(0);
    let moves = norm.sim_moves();
    let bound = move_bound(n);
    let moves_ok = moves as f64 <= bound;
    let result_ok = norm.sorting.tree == build_tn(n);

    let mut out = String::new();
    writeln!(out, "{}", norm.sorting.tree).unwrap();
    writeln!(out, "n {n}").unwrap();
    writeln!(out, "height {} -> {}", t.height(), norm.reduction.tree.height()).unwrap();
    writeln!(out, "reduce_rounds {} budget {} {}", norm.reduction.rounds, reduce_budget, pass(reduce_ok)).unwrap();
    writeln!(out, "sort_rounds {} budget {} {}", norm.sorting.rounds, norm.sorting.budget.max(0), pass(sort_ok)).unwrap();
    writeln!(out, "sim_moves {moves} bound {bound:.2} {}", pass(moves_ok)).unwrap();
    writeln!(out, "equals_tn {}", pass(result_ok)).unwrap();
    writeln!(out, "ripeness_violations {}", norm.sorting.ripeness_violations.len()).unwrap();
    for (round, addr) in &norm.sorting.ripeness_violations {
        log::warn!("round {round}: edge '{addr}' lost ripeness");
    }
    cli.emit(&out)?;

    if let Some(path) = script {
        write_file(path, &norm.script(&t).to_string())?;
    }
    if let Some(path) = trace {
        write_file(path, &sort_trace_csv(&norm)?)?;
    }
    if reduce_ok && sort_ok && moves_ok && result_ok {
        Ok(())
    } else {
        Err(Failure::Check(anyhow!("bound check failed for {t}")))
    }
}

fn sort_trace_csv(norm: &Normalization) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Check(e.into());
    w.write_record(["stage", "round", "phase", "steps", "height", "max_unsorted_level"]).map_err(io)?;
    for row in &norm.reduction.trace {
        w.write_record([
            "reduce".to_string(),
            row.round.to_string(),
            String::new(),
            row.steps_fired.to_string(),
            row.height.to_string(),
            String::new(),
        ])
        .map_err(io)?;
    }
    for row in &norm.sorting.trace {
        w.write_record([
            "sort".to_string(),
            row.round.to_string(),
            row.phase.to_string(),
            row.steps.to_string(),
            row.height.to_string(),
            row.max_unsorted_level.to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Check(anyhow!("{e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn cmd_distance(cli: &Cli, a: &str, b: &str, metric: Metric, exact: bool, script: Option<&Path>) -> Result<(), Failure> {
    let t1 = read_tree(a)?;
    let t2 = read_tree(b)?;
    if t1.complexity() != t2.complexity() {
        return Err(Failure::Input(anyhow!(
            "complexities differ: {} vs {}",
            t1.complexity(),
            t2.complexity()
        )));
    }
    if exact {
        if cli.guard_override {
            return Err(Failure::Input(anyhow!("--guard-override is refused for exact oracle queries")));
        }
        let d = exact_distance(&t1, &t2, metric)?;
        return cli.emit(&format!("{d}\n"));
    }
    let ub = distance_upper(&t1, &t2)?;
    let replayed = ub.script.replay(&t1).map_err(|e| Failure::Check(e.into()))?;
    if replayed != t2 {
        return Err(Failure::Check(anyhow!("upper-bound script ends at {replayed}, not {t2}")));
    }
    let value = upper_value(&ub.script, ub.bound, metric);
    if let Some(path) = script {
        write_file(path, &ub.script.to_string())?;
    }
    cli.emit(&format!("{value}\n"))?;
    if t1.complexity() <= metric.guard() {
        let d = exact_distance(&t1, &t2, metric)?;
        log::info!("exact {metric} distance {d}, upper {value}");
        if value < d {
            return Err(Failure::Check(anyhow!("upper bound {value} is below the exact distance {d}")));
        }
    }
    Ok(())
}

/// The `d_S` bound, or for `d_W` the number of single steps in the script.
pub fn upper_value(script: &MoveScript, bound: usize, metric: Metric) -> usize {
    match metric {
        Metric::S => bound,
        Metric::W => script.groups.iter().map(Vec::len).sum(),
    }
}

fn cmd_gen(cli: &Cli, kind: GenKind, params: &[usize], eps: f64) -> Result<(), Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let tree_param = |guard: usize| -> Result<usize, Failure> {
        let [n] = params else {
            return Err(Failure::Input(anyhow!("{kind:?} takes one parameter n, got {}", params.len())));
        };
        if *n > guard && !cli.guard_override {
            return Err(Failure::Input(anyhow!("n = {n} exceeds the generator guard {guard}; pass --guard-override")));
        }
        Ok(*n)
    };
    let graph_params = || -> Result<(usize, usize), Failure> {
        let [g, p] = params else {
            return Err(Failure::Input(anyhow!("{kind:?} takes two parameters g p, got {}", params.len())));
        };
        if g + p > MAX_GEN_GRAPH && !cli.guard_override {
            return Err(Failure::Input(anyhow!("g + p = {} exceeds the generator guard {MAX_GEN_GRAPH}; pass --guard-override", g + p)));
        }
        Ok((*g, *p))
    };
    let text = match kind {
        GenKind::RandomTree => tree_line(&random_tree(tree_param(MAX_GEN_TREE)?, &mut rng)),
        GenKind::Caterpillar => tree_line(&caterpillar(tree_param(MAX_GEN_TREE)?)),
        GenKind::Tn => tree_line(&build_tn(tree_param(MAX_GEN_TREE)?)),
        GenKind::LineGraph => {
            let (g, p) = graph_params()?;
            make_line_graph(g, p)?.to_string()
        }
        GenKind::BouquetGraph => {
            let (g, p) = graph_params()?;
            make_bouquet_graph(g, p)?.to_string()
        }
        GenKind::RandomTrivalent => {
            let (g, p) = graph_params()?;
            random_marked_graph(g, p, &mut rng)?.to_string()
        }
        GenKind::RandomMetric => {
            if eps.is_nan() || eps <= 0.0 {
                return Err(Failure::Input(anyhow!("--eps must be positive")));
            }
            random_thick_graph(tree_param(MAX_GEN_GRAPH)?, eps, &mut rng)?.to_string()
        }
    };
    cli.emit(&text)
}

fn tree_line(t: &LabeledTree) -> String {
    format!("{t}\n")
}

fn cmd_replay(cli: &Cli, arg: &str, script: &Path) -> Result<(), Failure> {
    let t = read_tree(arg)?;
    let text = read_file(script)?;
    let script = MoveScript::parse(&text).map_err(|e| Failure::Input(e.into()))?;
    let out = script.replay(&t).map_err(|e| Failure::Input(e.into()))?;
    cli.emit(&tree_line(&out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use whitehead_core::rewriting::{Direction, ScriptStep};

    #[test]
    fn move_bound_floor() {
        assert_eq!(move_bound(0), 40.0);
        assert_eq!(move_bound(16), 160.0);
    }

    #[test]
    fn w_upper_counts_steps() {
        let step = |a: &str| ScriptStep { address: a.to_string(), direction: Direction::from_digit(1).unwrap() };
        let s = MoveScript { groups: vec![vec![step("a"), step("b")], vec![step("")]] };
        assert_eq!(upper_value(&s, 7, Metric::W), 3);
        assert_eq!(upper_value(&s, 7, Metric::S), 7);
    }
}
