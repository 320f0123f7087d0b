use std::fmt;

use rand::Rng;

use crate::graph::random_marked_graph;

use super::stages::{collapse_to_rose, expand_vertices, fold_rose, interpolate_trivalent};
use super::{MetricError, MetricGraph};

/// Lipschitz constant charged per simultaneous Whitehead move between
/// unit-length trivalent graphs.
pub const DEFAULT_MOVE_CONSTANT: f64 = 3.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Stage {
    pub name: &'static str,
    pub anchor: &'static str,
    pub constant: f64,
    /// The bound the constant is checked against, when the stage has one.
    pub bound: Option<f64>,
}

impl Stage {
    pub fn holds(&self) -> bool {
        self.constant >= 1.0 && self.bound.is_none_or(|b| self.constant <= b * (1.0 + 1e-12))
    }
}

/// Upper bound on the Lipschitz constant of a map `G -> H` as a product of
/// four stage constants.
#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzCertificate {
    pub n: usize,
    pub eps: f64,
    /// Collapse, fold, interpolate, expand, in that order.
    pub stages: [Stage; 4],
    pub total: f64,
    /// Natural log of `total`.
    pub log_total: f64,
    pub witness_k: f64,
    pub fold_rounds: u32,
    pub moves: usize,
    pub move_constant: f64,
    /// Combinatorial diameter of `G` (edges of length 1), against 1 for the
    /// rose.
    pub diameter: usize,
}

impl LipschitzCertificate {
    pub const CSV_HEADER: [&'static str; 7] = ["n", "eps", "c1", "c2", "c3", "c4", "log_total"];

    pub fn csv_row(&self) -> [String; 7] {
        [
            self.n.to_string(),
            self.eps.to_string(),
            self.stages[0].constant.to_string(),
            self.stages[1].constant.to_string(),
            self.stages[2].constant.to_string(),
            self.stages[3].constant.to_string(),
            self.log_total.to_string(),
        ]
    }

    pub fn holds(&self) -> bool {
        self.stages.iter().all(Stage::holds)
    }

    /// Interpolation moves per `log2 n`.
    pub fn moves_per_log2n(&self) -> f64 {
        self.moves as f64 / (self.n as f64).log2().max(1.0)
    }
}

impl fmt::Display for LipschitzCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "certificate n={} eps={}", self.n, self.eps)?;
        for (i, s) in self.stages.iter().enumerate() {
            let bound = s.bound.map_or("-".to_string(), |b| b.to_string());
            writeln!(
                f,
                "stage {} {:<12} constant={} bound={} {} ({})",
                i + 1,
                s.name,
                s.constant,
                bound,
                if s.holds() { "PASS" } else { "FAIL" },
                s.anchor
            )?;
        }
        writeln!(f, "witness_k={} fold_rounds={} moves={} move_constant={}", self.witness_k, self.fold_rounds, self.moves, self.move_constant)?;
        writeln!(f, "diameter={} total={} log_total={}", self.diameter, self.total, self.log_total)
    }
}

/// Composes the four stages for `G -> H`. Both graphs must have the same
/// rank `n >= 2`, volume `n`, and shortest cycle at least `eps`.
pub fn lipschitz_pipeline(g: &MetricGraph, h: &MetricGraph, eps: f64, move_constant: f64) -> Result<LipschitzCertificate, MetricError> {
    let n = g.rank();
    if h.rank() != n {
        return Err(MetricError::RankMismatch(n, h.rank()));
    }
    if n < 2 {
        return Err(MetricError::RankTooSmall(n));
    }
    g.check_normalized()?;
    h.check_normalized()?;
    h.check_thick(eps)?;
    let collapse = collapse_to_rose(g, eps)?;
    let fold = fold_rose(n)?;
    let expansion = expand_vertices(h)?;
    let interp = interpolate_trivalent(&fold.graph, &expansion.graph, move_constant)?;
    let nf = n as f64;
    let stages = [
        Stage {
            name: "collapse",
            anchor: "shortest spanning tree collapsed onto the rose",
            constant: collapse.constant,
            bound: Some(collapse.witness_k * nf / eps),
        },
        Stage {
            name: "fold",
            anchor: "rose folded to a trivalent unit graph",
            constant: fold.constant,
            bound: Some(2f64.powi(nf.log2().ceil() as i32)),
        },
        Stage {
            name: "interpolate",
            anchor: "simultaneous Whitehead moves between trivalent graphs",
            constant: interp.constant,
            bound: None,
        },
        Stage {
            name: "expand",
            anchor: "inserted vertex trees collapsed back",
            constant: expansion.constant,
            bound: Some(nf),
        },
    ];
    let log_total = collapse.constant.ln() + fold.constant.ln() + interp.log_constant + expansion.constant.ln();
    Ok(LipschitzCertificate {
        n,
        eps,
        total: log_total.exp(),
        log_total,
        stages,
        witness_k: collapse.witness_k,
        fold_rounds: fold.rounds,
        moves: interp.moves,
        move_constant,
        diameter: g.graph.diameter(crate::exec::Execution::Sequential),
    })
}

/// Random trivalent graph of rank `n` with lengths drawn from `[1, 2)`,
/// rescaled to volume `n`, and retried until its shortest cycle is at
/// least `eps`.
pub fn random_thick_graph<R: Rng + ?Sized>(n: usize, eps: f64, rng: &mut R) -> Result<MetricGraph, MetricError> {
    if n < 2 {
        return Err(MetricError::RankTooSmall(n));
    }
    let mut best = 0.0f64;
    for _ in 0..10_000 {
        let m = random_marked_graph(n, 0, rng)?;
        let lengths: Vec<f64> = (0..m.graph().edge_count()).map(|_| rng.gen_range(1.0..2.0)).collect();
        let g = MetricGraph::normalized(m.graph().clone(), lengths)?;
        let t = g.thickness();
        if t >= eps {
            return Ok(g);
        }
        best = best.max(t);
    }
    Err(MetricError::NotThick { eps, thickness: best })
}
