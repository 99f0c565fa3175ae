//! Generators for standard combinatorial problems and brute-force oracles
//! that solve the same instances in their native search space.
//!
//! Each generator has a data struct with `build` (the [`ProblemInstance`])
//! and `oracle` (exhaustive search over subsets, labelings or permutations,
//! never through a Hamiltonian). [`ProblemSpec`] wraps them all for JSON
//! input of the form `{"problem": "<name>", "data": {…}}`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{assignments, Assignment, DiscreteVariable, ModelError, ProblemInstance};

pub mod catalog;
mod other;
mod partitioning;
mod permutations;
mod subsets;

pub use catalog::{reference_instance, reference_instances};
pub use other::{
    generator_from_check, hamming_7_4, particular_solution, Ksat, KsatMode, Mod2LinProg, SyndromeDecoding,
    SyndromeForm,
};
pub use partitioning::{
    CliqueCover, CliqueSize, Cliques, Clustering, GraphColoring, GraphPartitioning, NumberPartitioning,
    PartitionSizes,
};
pub use permutations::{
    HamiltonianCycle, MachineScheduling, NurseMode, NurseScheduling, ScheduleObjective, Tsp,
};
pub use subsets::{Knapsack, MinMaximalMatching, Mis, SetCover, SetPacking, VertexCover};

/// Oracles refuse to enumerate more native states than this.
pub const ORACLE_LIMIT: u64 = 1 << 24;

/// Objective values closer than this count as equal.
pub const OBJECTIVE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("oracle search space of {states} states exceeds the limit of {limit}")]
    TooLarge { states: u64, limit: u64 },
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T, ProblemError> {
    Err(ProblemError::Invalid(msg.into()))
}

/// Graph or hypergraph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphInput {
    pub n: usize,
    pub edges: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl GraphInput {
    pub fn new(n: usize, edges: Vec<Vec<usize>>) -> Self {
        GraphInput { n, edges, weights: None }
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Self {
        self.weights = Some(weights);
        self
    }

    pub fn path(n: usize) -> Self {
        GraphInput::new(n, (1..n).map(|i| vec![i - 1, i]).collect())
    }

    pub fn cycle(n: usize) -> Self {
        GraphInput::new(n, (0..n).map(|i| vec![i, (i + 1) % n]).collect())
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push(vec![i, j]);
            }
        }
        GraphInput::new(n, edges)
    }

    /// Star with `leaves` leaves around vertex 0.
    pub fn star(leaves: usize) -> Self {
        GraphInput::new(leaves + 1, (1..=leaves).map(|i| vec![0, i]).collect())
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        let mut seen = BTreeSet::new();
        for e in &self.edges {
            if e.len() < 2 {
                return invalid(format!("edge {e:?} has fewer than two vertices"));
            }
            if let Some(&v) = e.iter().find(|&&v| v >= self.n) {
                return invalid(format!("edge {e:?} references vertex {v} outside 0..{}", self.n));
            }
            let set: BTreeSet<usize> = e.iter().copied().collect();
            if set.len() != e.len() {
                return invalid(format!("edge {e:?} repeats a vertex"));
            }
            if !seen.insert(set) {
                return invalid(format!("duplicate edge {e:?}"));
            }
        }
        if let Some(w) = &self.weights {
            if w.len() != self.edges.len() {
                return invalid(format!("{} weights for {} edges", w.len(), self.edges.len()));
            }
            if w.iter().any(|x| !x.is_finite()) {
                return invalid("edge weights must be finite");
            }
        }
        Ok(())
    }

    pub fn validate_simple(&self) -> Result<(), ProblemError> {
        self.validate()?;
        if self.edges.iter().any(|e| e.len() != 2) {
            return invalid("this problem needs a graph, not a hypergraph");
        }
        Ok(())
    }

    pub fn weight(&self, edge: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[edge])
    }

    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let mut a = vec![vec![false; self.n]; self.n];
        for e in &self.edges {
            for &u in e {
                for &v in e {
                    if u != v {
                        a[u][v] = true;
                    }
                }
            }
        }
        a
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.contains(&v)).count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn max_rank(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Outcome of a brute-force search: the optimal objective and every primary
/// assignment attaining it. `optimum` is `None` when nothing is feasible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub optimum: Option<f64>,
    pub witnesses: Vec<Assignment>,
    pub feasible: bool,
}

/// Running minimum over feasible candidates.
#[derive(Default)]
pub(crate) struct Best {
    optimum: Option<f64>,
    witnesses: Vec<Assignment>,
}

impl Best {
    pub(crate) fn offer(&mut self, value: f64, witness: impl FnOnce() -> Assignment) {
        match self.optimum {
            Some(b) if value > b + OBJECTIVE_TOLERANCE => {}
            Some(b) if value >= b - OBJECTIVE_TOLERANCE => self.witnesses.push(witness()),
            _ => {
                self.optimum = Some(value);
                self.witnesses = vec![witness()];
            }
        }
    }

    pub(crate) fn finish(mut self) -> OracleResult {
        self.witnesses.sort();
        self.witnesses.dedup();
        OracleResult {
            feasible: self.optimum.is_some(),
            optimum: self.optimum,
            witnesses: self.witnesses,
        }
    }
}

pub(crate) fn check_space(states: u64) -> Result<(), ProblemError> {
    if states > ORACLE_LIMIT {
        return Err(ProblemError::TooLarge {
            states,
            limit: ORACLE_LIMIT,
        });
    }
    Ok(())
}

pub(crate) fn space(base: usize, digits: usize) -> u64 {
    (base as u64).checked_pow(digits as u32).unwrap_or(u64::MAX)
}

/// Every vector in `0..base` of length `digits`, first position fastest.
pub(crate) fn labelings(base: usize, digits: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = space(base, digits);
    (0..total).map(move |mut z| {
        (0..digits)
            .map(|_| {
                let d = (z % base as u64) as usize;
                z /= base as u64;
                d
            })
            .collect()
    })
}

pub(crate) fn bits_of(z: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| z >> i & 1 == 1).collect()
}

pub(crate) fn named(prefix: &str, values: impl IntoIterator<Item = (usize, i64)>) -> Assignment {
    values.into_iter().map(|(i, v)| (format!("{prefix}_{i}"), v)).collect()
}

/// Brute force over the instance's own variables, auxiliaries included, for
/// models that come without a generator. Witnesses keep primary variables only.
pub fn instance_oracle(p: &ProblemInstance) -> Result<OracleResult, ProblemError> {
    p.validate()?;
    let states = p
        .variables
        .iter()
        .try_fold(1u64, |acc, v| acc.checked_mul(v.size() as u64))
        .unwrap_or(u64::MAX);
    check_space(states)?;
    let vars: Vec<&DiscreteVariable> = p.variables.iter().collect();
    let mut best = Best::default();
    for a in assignments(&vars) {
        if !p.is_feasible(&a)? {
            continue;
        }
        best.offer(p.eval_objective(&a)?, || {
            p.primary_variables().map(|v| (v.id.clone(), a[&v.id])).collect()
        });
    }
    Ok(best.finish())
}

/// Any supported problem, tagged for JSON input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", content = "data", rename_all = "snake_case")]
pub enum ProblemSpec {
    Clustering(Clustering),
    NumberPartitioning(NumberPartitioning),
    GraphColoring(GraphColoring),
    GraphPartitioning(GraphPartitioning),
    CliqueCover(CliqueCover),
    Cliques(Cliques),
    Mis(Mis),
    SetPacking(SetPacking),
    VertexCover(VertexCover),
    MinMaximalMatching(MinMaximalMatching),
    SetCover(SetCover),
    Knapsack(Knapsack),
    HamiltonianCycle(HamiltonianCycle),
    Tsp(Tsp),
    MachineScheduling(MachineScheduling),
    NurseScheduling(NurseScheduling),
    Ksat(Ksat),
    SyndromeDecoding(SyndromeDecoding),
    Mod2Linprog(Mod2LinProg),
}

macro_rules! dispatch {
    ($self:expr, $p:ident => $body:expr) => {
        match $self {
            ProblemSpec::Clustering($p) => $body,
            ProblemSpec::NumberPartitioning($p) => $body,
            ProblemSpec::GraphColoring($p) => $body,
            ProblemSpec::GraphPartitioning($p) => $body,
            ProblemSpec::CliqueCover($p) => $body,
            ProblemSpec::Cliques($p) => $body,
            ProblemSpec::Mis($p) => $body,
            ProblemSpec::SetPacking($p) => $body,
            ProblemSpec::VertexCover($p) => $body,
            ProblemSpec::MinMaximalMatching($p) => $body,
            ProblemSpec::SetCover($p) => $body,
            ProblemSpec::Knapsack($p) => $body,
            ProblemSpec::HamiltonianCycle($p) => $body,
            ProblemSpec::Tsp($p) => $body,
            ProblemSpec::MachineScheduling($p) => $body,
            ProblemSpec::NurseScheduling($p) => $body,
            ProblemSpec::Ksat($p) => $body,
            ProblemSpec::SyndromeDecoding($p) => $body,
            ProblemSpec::Mod2Linprog($p) => $body,
        }
    };
}

impl ProblemSpec {
    pub fn build(&self) -> Result<ProblemInstance, ProblemError> {
        let p = dispatch!(self, p => p.build())?;
        p.validate()?;
        Ok(p)
    }

    pub fn oracle(&self) -> Result<OracleResult, ProblemError> {
        dispatch!(self, p => p.oracle())
    }

    pub fn name(&self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v["problem"].as_str().map(str::to_string))
            .unwrap_or_default()
    }
}
