//! Constrained subset problems over binary membership variables.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{bits_of, check_space, invalid, named, space, Best, GraphInput, OracleResult, ProblemError};
use crate::model::{Constraint, DiscreteVariable, Expr, ProblemInstance};

fn binary_vars(p: &mut ProblemInstance, prefix: &str, n: usize) -> Result<Vec<DiscreteVariable>, ProblemError> {
    (0..n)
        .map(|i| Ok(p.add_variable(DiscreteVariable::new(format!("{prefix}_{i}"), 0, 1)?)))
        .collect()
}

fn sum_values(vars: &[DiscreteVariable]) -> Expr {
    Expr::sum(vars.iter().map(DiscreteVariable::value))
}

/// Runs `score` on every subset of `0..n`, keeping the minimal feasible ones.
fn subset_oracle(
    n: usize,
    prefix: &str,
    mut score: impl FnMut(&[bool]) -> Option<f64>,
) -> Result<OracleResult, ProblemError> {
    check_space(space(2, n))?;
    let mut best = Best::default();
    for z in 0..1u64 << n {
        let chosen = bits_of(z, n);
        if let Some(f) = score(&chosen) {
            best.offer(f, || named(prefix, chosen.iter().enumerate().map(|(i, &b)| (i, b as i64))));
        }
    }
    Ok(best.finish())
}

/// Adjacent vertex pairs `i < j`, counting each pair once even when several
/// hyperedges contain it.
fn adjacent_pairs(g: &GraphInput) -> Vec<(usize, usize)> {
    let a = g.adjacency();
    let mut pairs = Vec::new();
    for i in 0..g.n {
        for j in i + 1..g.n {
            if a[i][j] {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Maximum independent set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mis {
    pub graph: GraphInput,
}

impl Mis {
    pub fn build(&self) -> Result<ProblemInstance, ProblemError> {
        self.graph.validate()?;
        let mut p = ProblemInstance::new("mis", "largest set of pairwise non-adjacent vertices");
        let x = binary_vars(&mut p, "x", self.graph.n)?;
        p.objective = -sum_values(&x);
        let c = Expr::sum(adjacent_pairs(&self.graph).into_iter().map(|(i, j)| x[i].value() * x[j].value()));
        p.add_constraint(Constraint::eq(c, 0.0, "independent").one_sided());
        Ok(p)
    }

    pub fn oracle(&self) -> Result<OracleResult, ProblemError> {
        self.graph.validate()?;
        let pairs = adjacent_pairs(&self.graph);
        subset_oracle(self.graph.n, "x", |s| {
            if pairs.iter().any(|&(i, j)| s[i] && s[j]) {
                None
            } else {
                Some(-(s.iter().filter(|&&b| b).count() as f64))
            }
        })
    }
}

/// Largest family of pairwise disjoint subsets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetPacking {
    pub subsets: Vec<Vec<i64>>,
}

impl SetPacking {
    fn overlaps(&self) -> Vec<(usize, usize)> {
        let sets: Vec<BTreeSet<i64>> = self.subsets.iter().map(|s| s.iter().copied().collect()).collect();
        let mut pairs = Vec::new();
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if !sets[i].is_disjoint(&sets[j]) {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    pub fn build(&self) -> Result<ProblemInstance, ProblemError> {
        let mut p = ProblemInstance::new("set_packing", "largest family of disjoint subsets");
        let x = binary_vars(&mut p, "x", self.subsets.len())?;
        p.objective = -sum_values(&x);
        let c = Expr::sum(self.overlaps().into_iter().map(|(i, j)| x[i].value() * x[j].value()));
        p.add_constraint(Constraint::eq(c, 0.0, "disjoint").one_sided());
        Ok(p)
    }

    pub fn oracle(&self) -> Result<OracleResult, ProblemError> {
        let n = self.subsets.len();
        subset_oracle(n, "x", |s| {
            let mut used = BTreeSet::new();
            for (i, set) in self.subsets.iter().enumerate() {
                if s[i] {
                    let items: BTreeSet<i64> = set.iter().copied().collect();
                    if !used.is_disjoint(&items) {
                        return None;
                    }
                    used.extend(items);
                }
            }
            Some(-(s.iter().filter(|&&b| b).count() as f64))
        })
    }
}

/// Smallest vertex set touching every (hyper)edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexCover {
    pub graph: GraphInput,
}

impl VertexCover {
    pub fn build(&self) -> Result<ProblemInstance, ProblemError> {
        self.graph.validate()?;
        let mut p = ProblemInstance::new("vertex_cover", "smallest set touching every edge");
        let x = binary_vars(&mut p, "x", self.graph.n)?;
        p.objective = sum_values(&x);
        let c = Expr::sum(
            self.graph
                .edges
                .iter()
                .map(|e| Expr::prod(e.iter().map(|&i| Expr::one() - x[i].value()))),
        );
        p.add_constraint(Constraint::eq(c, 0.0, "covered").one_sided());
        Ok(p)
    }

    pub fn oracle(&self) -> Result<OracleResult, ProblemError> {
        self.graph.validate()?;
        subset_oracle(self.graph.n, "x", |s| {
            if self.graph.edges.iter().all(|e| e.iter().any(|&i| s[i])) {
                Some(s.iter().filter(|&&b| b).count() as f64)
            } else {
                None
            }
        })
    }
}

/// Fewest edges forming a maximal matching. Variables `x_e` follow the edge order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinMaximalMatching {
    pub graph: GraphInput,
}

impl MinMaximalMatching {
    pub fn build(&self) -> Result<ProblemInstance, ProblemError> {
        let g = &self.graph;
        g.validate()?;
        let mut p = ProblemInstance::new("min_maximal_matching", "smallest maximal matching");
        let x = binary_vars(&mut p, "x", g.edges.len())?;
        p.objective = sum_values(&x);
        let incident: Vec<Vec<usize>> = (0..g.n)
            .map(|v| (0..g.edges.len()).filter(|&e| g.edges[e].contains(&v)).collect())
            .collect();
        let mut shared = Vec::new();
        for inc in &incident {
            for (a, &e) in inc.iter().enumerate() {
                for &f in &inc[a + 1..] {
                    shared.push(x[e].value() * x[f].value());
                }
            }
        }
        p.add_constraint(Constraint::eq(Expr::sum(shared), 0.0, "matching").one_sided());
        // y_u = Σ_{e∋u} x_e is 0 or 1 once the matching constraint holds.
        let y = |u: usize| Expr::sum(incident[u].iter().map(|&e| x[e].value()));
        let uncovered = Expr::sum(
            g.edges
                .iter()
                .map(|e| Expr::prod(e.iter().map(|&u| Expr::one() - y(u)))),
        );
        p.add_constraint(Constraint::eq(uncovered, 0.0, "maximal").with_priority(1).one_sided());
        Ok(p)
    }

    pub fn oracle(&self) -> Result<OracleResult, ProblemError> {
        let g = &self.graph;
        g.validate()?;
        subset_oracle(g.edges.len(), "x", |s| {
            let mut covered = vec![false; g.n];
            for (e, edge) in g.edges.iter().enumerate() {
                if s[e] {
                    if edge.iter().any(|&u| covered[u]) {
                        return None;
                    }
                    for &u in edge {
                        covered[u] = true;
                    }
                }
            }
            if g.edges.iter().all(|e| e.iter().any(|&u| covered[u])) {
                Some(s.iter().filter(|&&b| b).count() as f64)
            } else {
                None
            }
        })
    }
}

/// Fewest subsets covering the universe; `exact` demands each element be
/// covered exactly once.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetCover {
    pub universe: Vec<i64>,
    pub subsets: Vec<Vec<i64>>,
    #[serde(default)]
    pub exact: bool,
}

impl SetCover {
    fn containing(&self, u: i64) -> Vec<usize> {
        (0..self.subsets.len()).filter(|&i| self.subsets[i].contains(&u)).collect()
    }

    pub fn build(&self) -> Result<ProblemInstance, ProblemError> {
        let distinct: BTreeSet<i64> = self.universe.iter().copied().collect();
        if distinct.len() != self.universe.len() {
            return invalid("universe lists an element twice");
        }
        let mut p = ProblemInstance::new("set_cover", "fewest subsets covering every element");
        let x = binary_vars(&mut p, "x", self.subsets.len())?;
        p.objective = sum_values(&x);
        for (a, &u) in self.universe.iter().enumerate() {
            let holders = self.containing(u);
            let count = Expr::sum(holders.iter().map(|&i| x[i].value()));
            if self.exact {
                p.add_constraint(Constraint::eq(count, 1.0, format!("exact_{a}")));
            } else {
                // y_α counts the chosen subsets holding u_α and has no zero value.
                let y = DiscreteVariable::new(format!("y_{a}"), 1, holders.len().max(1) as i64)?.auxiliary();
                let y = p.add_variable(y);
                p.add_constraint(Constraint::eq(y.value() - count, 0.0, format!("cover_{a}")));
            }
        }
        Ok(p)
    }

    pub fn oracle(&self) -> Result<OracleResult, ProblemError> {
        subset_oracle(self.subsets.len(), "x", |s| {
            let ok = self.universe.iter().all(|&u| {
                let hits = self.containing(u).into_iter().filter(|&i| s[i]).count();
                if self.exact {
                    hits == 1
                } else {
                    hits >= 1
                }
            });
            ok.then(|| s.iter().filter(|&&b| b).count() as f64)
        })
    }
}

/// 0/1 knapsack with integer weights and total weight at most `capacity`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Knapsack {
    pub values: Vec<f64>,
    pub weights: Vec<i64>,
    pub capacity: i64,
}

impl Knapsack {
    fn check(&self) -> Result<(), ProblemError> {
        if self.values.len() != self.weights.len() {
            return invalid("values and weights differ in length");
        }
        if self.weights.iter().any(|&w| w < 0) {
            return invalid("weights must be nonnegative");
        }
        Ok(())
    }

    pub fn build(&self) -> Result<ProblemInstance, ProblemError> {
        self.check()?;
        let mut p = ProblemInstance::new("knapsack", "most valuable selection within the weight limit");
        let x = binary_vars(&mut p, "x", self.values.len())?;
        p.objective = -Expr::sum(x.iter().zip(&self.values).map(|(v, &d)| v.value() * d));
        let load = Expr::sum(x.iter().zip(&self.weights).map(|(v, &w)| v.value() * w as f64));
        p.add_constraint(Constraint::le(load, self.capacity as f64, "capacity"));
        Ok(p)
    }

    pub fn oracle(&self) -> Result<OracleResult, ProblemError> {
        self.check()?;
        subset_oracle(self.values.len(), "x", |s| {
            let w: i64 = (0..s.len()).filter(|&i| s[i]).map(|i| self.weights[i]).sum();
            (w <= self.capacity).then(|| -(0..s.len()).filter(|&i| s[i]).map(|i| self.values[i]).sum::<f64>())
        })
    }
}
