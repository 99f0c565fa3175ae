//! Partitioning problems: labelings `v_i ∈ 1..K` of elements or vertices,
//! plus the clique search, which uses binary membership variables.

use serde::{Deserialize, Serialize};

use super::{bits_of, check_space, invalid, labelings, named, space, Best, GraphInput, OracleResult, ProblemError};
use crate::model::{element_count, equal_indicator, value_used, Constraint, DiscreteVariable, Expr, ProblemInstance};

fn label_vars(p: &mut ProblemInstance, n: usize, k: usize) -> Result<Vec<DiscreteVariable>, ProblemError> {
    (0..n)
        .map(|i| Ok(p.add_variable(DiscreteVariable::new(format!("v_{i}"), 1, k as i64)?)))
        .collect()
}

fn binary_vars(p: &mut ProblemInstance, prefix: &str, n: usize) -> Result<Vec<DiscreteVariable>, ProblemError> {
    (0..n)
        .map(|i| Ok(p.add_variable(DiscreteVariable::new(format!("{prefix}_{i}"), 0, 1)?)))
        .collect()
}

fn refs(vars: &[DiscreteVariable]) -> Vec<&DiscreteVariable> {
    vars.iter().collect()
}

fn colors_used(vars: &[DiscreteVariable], k: usize) -> Expr {
    let r = refs(vars);
    Expr::sum((1..=k as i64).map(|a| Expr::one() - value_used(&r, a)))
}

fn labels_assignment(labels: &[usize]) -> super::Assignment {
    named("v", labels.iter().enumerate().map(|(i, &l)| (i, l as i64 + 1)))
}

fn distinct(labels: &[usize]) -> usize {
    let mut seen: Vec<usize> = labels.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

fn need_k(k: usize) -> Result<(), ProblemError> {
    if k == 0 {
        return invalid("K must be at least 1");
    }
    Ok(())
}

/// Groups points into `k` clusters minimizing the summed intra-cluster
/// distance, with total weight per cluster at most `w_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub distances: Vec<Vec<f64>>,
    pub weights: Vec<i64>,
    pub k: usize,
    pub w_max: i64,
}

impl Clustering {
    fn check(&self) -> Result<usize, ProblemError> {
        need_k(self.k)?;
        let n = self.weights.len();
        if self.distances.len() != n || self.distances.iter().any(|r| r.len() != n) {
            return invalid("distance matrix must be n×n with one weight per point");
        }
        Ok(n)
    }

    pub fn build(&self) -> Result<ProblemInstance, ProblemError> {
        let n = self.check()?;
        let mut p = ProblemInstance::new("clustering", "minimize the summed intra-cluster distance");
        let v = label_vars(&mut p, n, self.k)?;
        let mut cost = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let d = self.distances[i][j];
                if d != 0.0 {
                    cost.push(equal_indicator(&v[i], &v[j]) * d);
                }
            }
        }
        p.objective = Expr::sum(cost);
        for a in 1..=self.k as i64 {
            let load = Expr::sum(v.iter().zip(&self.weights).map(|(x, &w)| x.indicator(a) * w as f64));
            p.add_constraint(Constraint::le(load, self.w_max as f64, format!("capacity_{a}")));
        }
        Ok(p)
    }

    pub fn oracle(&self) -> Result<OracleResult, ProblemError> {
        let n = self.check()?;
        check_space(space(self.k, n))?;
        let mut best = Best::default();
        for labels in labelings(self.k, n) {
            let overloaded = (0..self.k).any(|c| {
                let load: i64 = (0..n).filter(|&i| labels[i] == c).map(|i| self.weights[i]).sum();
                load > self.w_max
            });
            if overloaded {
                continue;
            }
            let mut cost = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    if labels[i] == labels[j] {
                        cost += self.distances[i][j];
                    }
                }
            }
            best.offer(cost, || labels_assignment(&labels));
        }
        Ok(best.finish())
    }
}

/// Splits numbers into `k` subsets with sums as equal as possible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumberPartitioning {
    pub numbers: Vec<f64>,
    pub k: usize,
}

impl NumberPartitioning {
    pub fn build(&self) -> Result<ProblemInstance, ProblemError> {
        need_k(self.k)?;
        let mut p = ProblemInstance::new("number_partitioning", "equalize subset sums");
        let v = label_vars(&mut p, self.numbers.len(), self.k)?;
        let part = |a: i64| Expr::sum(v.iter().zip(&self.numbers).map(|(x, &u)| x.indicator(a) * u));
        p.objective = if self.k == 2 {
            // (Σ s_i u_i)² with s_i = ±1 for the two subsets.
            Expr::sum(
                v.iter()
                    .zip(&self.numbers)
                    .map(|(x, &u)| (x.indicator(2) * 2.0 - 1.0) * u),
            )
            .pow(2)
        } else {
            let k = self.k as i64;
            Expr::sum((1..=k).flat_map(|a| (a + 1..=k).map(move |b| (a, b))).map(|(a, b)| (part(a) - part(b)).pow(2)))
        };
        Ok(p)
    }

    pub fn oracle(&self) -> Result<OracleResult, ProblemError> {
        need_k(self.k)?;
        let n = self.numbers.len();
        check_space(space(self.k, n))?;
        let mut best = Best::default();
        for labels in labelings(self.k, n) {
            let mut sums = vec![0.0; self.k];
            for (i, &l) in labels.iter().enumerate() {
                sums[l] += self.numbers[i];
            }
            let mut f = 0.0;
            for a in 0..self.k {
                for b in a + 1..self.k {
                    f += (sums[a] - sums[b]).powi(2);
                }
            }
            best.offer(f, || labels_assignment(&labels));
        }
        Ok(best.finish())
    }
}

/// Proper vertex coloring with `k` colors, optionally using as few colors as possible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphColoring {
    pub graph: GraphInput,
    pub k: usize,
    #[serde(default)]
    pub minimize_colors: bool,
}

impl GraphColoring {
    pub fn build(&self) -> Result<ProblemInstance, ProblemError> {
        self.graph.validate_simple()?;
        need_k(self.k)?;
        let mut p = ProblemInstance::new("graph_coloring", "adjacent vertices get different colors");
        let v = label_vars(&mut p, self.graph.n, self.k)?;
        let clashes = Expr::sum(self.graph.edges.iter().map(|e| equal_indicator(&v[e[0]], &v[e[1]])));
        p.add_constraint(Constraint::eq(clashes, 0.0, "proper").one_sided());
        if self.minimize_colors {
            p.objective = colors_used(&v, self.k);
        }
        Ok(p)
    }

    pub fn oracle(&self) -> Result<OracleResult, ProblemError> {
        self.graph.validate_simple()?;
        need_k(self.k)?;
        check_space(space(self.k, self.graph.n))?;
        let mut best = Best::default();
        for labels in labelings(self.k, self.graph.n) {
            if self.graph.edges.iter().any(|e| labels[e[0]] == labels[e[1]]) {
                continue;
            }
            let f = if self.minimize_colors { distinct(&labels) as f64 } else { 0.0 };
            best.offer(f, || labels_assignment(&labels));
        }
        Ok(best.finish())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionSizes {
    #[default]
    Free,
    /// All parts equally large; needs `n` divisible by `k`.
    Equal,
    /// Part `α` has exactly `sizes[α − 1]` vertices.
    Exact(Vec<usize>),
}

/// Minimum (weighted) cut into `k` parts. A hyperedge is cut unless all of
/// its vertices share a part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphPartitioning {
    pub graph: GraphInput,
    pub k: usize,
    #[serde(default)]
    pub sizes: PartitionSizes,
}

impl GraphPartitioning {
    fn check(&self) -> Result<(), ProblemError> {
        self.graph.validate()?;
        need_k(self.k)?;
        match &self.sizes {
            PartitionSizes::Equal if !self.graph.n.is_multiple_of(self.k) => {
                invalid(format!("{} vertices cannot form {} equal parts", self.graph.n, self.k))
            }
            PartitionSizes::Exact(s) if s.len() != self.k || s.iter().sum::<usize>() != self.graph.n => {
                invalid("exact part sizes must list k sizes summing to n")
            }
            _ => Ok(()),
        }
    }

    pub fn build(&self) -> Result<ProblemInstance, ProblemError> {
        self.check()?;
        let mut p = ProblemInstance::new("graph_partitioning", "minimize the cut");
        let v = label_vars(&mut p, self.graph.n, self.k)?;
        let k = self.k as i64;
        p.objective = Expr::sum(self.graph.edges.iter().enumerate().map(|(idx, e)| {
            let together = Expr::sum((1..=k).map(|a| Expr::prod(e.iter().map(|&i| v[i].indicator(a)))));
            (Expr::one() - together) * self.graph.weight(idx)
        }));
        let r = refs(&v);
        match &self.sizes {
            PartitionSizes::Free => {}
            PartitionSizes::Equal => {
                let imbalance = Expr::sum(
                    (1..=k)
                        .flat_map(|a| (a + 1..=k).map(move |b| (a, b)))
                        .map(|(a, b)| (element_count(&r, a) - element_count(&r, b)).pow(2)),
                );
                p.add_constraint(Constraint::eq(imbalance, 0.0, "equal_sizes").one_sided());
            }
            PartitionSizes::Exact(sizes) => {
                for (a, &s) in (1..=k).zip(sizes) {
                    p.add_constraint(Constraint::eq(element_count(&r, a), s as f64, format!("size_{a}")));
                }
            }
        }
        Ok(p)
    }

    pub fn oracle(&self) -> Result<OracleResult, ProblemError> {
        self.check()?;
        check_space(space(self.k, self.graph.n))?;
        let mut best = Best::default();
        for labels in labelings(self.k, self.graph.n) {
            let mut counts = vec![0usize; self.k];
            for &l in &labels {
                counts[l] += 1;
            }
            let ok = match &self.sizes {
                PartitionSizes::Free => true,
                PartitionSizes::Equal => counts.iter().all(|&c| c == counts[0]),
                PartitionSizes::Exact(s) => counts == *s,
            };
            if !ok {
                continue;
            }
            let cut: f64 = self
                .graph
                .edges
                .iter()
                .enumerate()
                .filter(|(_, e)| e.iter().any(|&i| labels[i] != labels[e[0]]))
                .map(|(idx, _)| self.graph.weight(idx))
                .sum();
            best.offer(cut, || labels_assignment(&labels));
        }
        Ok(best.finish())
    }
}

/// Partition of the vertices into at most `k` cliques.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliqueCover {
    pub graph: GraphInput,
    pub k: usize,
    #[serde(default)]
    pub minimize: bool,
}

impl CliqueCover {
    pub fn build(&self) -> Result<ProblemInstance, ProblemError> {
        self.graph.validate_simple()?;
        need_k(self.k)?;
        let mut p = ProblemInstance::new("clique_cover", "every part is a complete graph");
        let v = label_vars(&mut p, self.graph.n, self.k)?;
        let r = refs(&v);
        let missing = Expr::sum((1..=self.k as i64).map(|a| {
            let t = element_count(&r, a);
            let pairs = (t.clone().pow(2) - t) * 0.5;
            let inside = Expr::sum(
                self.graph
                    .edges
                    .iter()
                    .map(|e| v[e[0]].indicator(a) * v[e[1]].indicator(a)),
            );
            pairs - inside
        }));
        p.add_constraint(Constraint::eq(missing, 0.0, "cliques").one_sided());
        if self.minimize {
            p.objective = colors_used(&v, self.k);
        }
        Ok(p)
    }

    pub fn oracle(&self) -> Result<OracleResult, ProblemError> {
        self.graph.validate_simple()?;
        need_k(self.k)?;
        check_space(space(self.k, self.graph.n))?;
        let adj = self.graph.adjacency();
        let mut best = Best::default();
        for labels in labelings(self.k, self.graph.n) {
            let n = self.graph.n;
            let ok = (0..n).all(|i| (i + 1..n).all(|j| labels[i] != labels[j] || adj[i][j]));
            if ok {
                let f = if self.minimize { distinct(&labels) as f64 } else { 0.0 };
                best.offer(f, || labels_assignment(&labels));
            }
        }
        Ok(best.finish())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CliqueSize {
    /// Decide whether a clique of exactly this size exists.
    Fixed(usize),
    /// Find a largest clique.
    Maximize,
}

/// Clique search with membership variables `x_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cliques {
    pub graph: GraphInput,
    pub size: CliqueSize,
}

impl Cliques {
    pub fn build(&self) -> Result<ProblemInstance, ProblemError> {
        self.graph.validate_simple()?;
        let mut p = ProblemInstance::new("cliques", "find a complete subgraph");
        let x = binary_vars(&mut p, "x", self.graph.n)?;
        let count = Expr::sum(x.iter().map(|v| v.value()));
        let edges = Expr::sum(self.graph.edges.iter().map(|e| x[e[0]].value() * x[e[1]].value()));
        match self.size {
            CliqueSize::Fixed(k) => {
                if k == 0 {
                    return invalid("clique size must be at least 1");
                }
                let target = (k * (k - 1) / 2) as f64;
                p.add_constraint(Constraint::eq(count, k as f64, "cardinality"));
                p.add_constraint(
                    Constraint::eq(-edges, -target, "edges")
                        .with_priority(1)
                        .one_sided(),
                );
            }
            CliqueSize::Maximize => {
                let kmax = self.graph.max_degree() as i64 + 1;
                let k = p.add_variable(DiscreteVariable::new("k", 1, kmax)?.auxiliary());
                p.objective = -count.clone();
                p.add_constraint(Constraint::eq(count - k.value(), 0.0, "cardinality"));
                let pairs = (k.value().pow(2) - k.value()) * 0.5;
                p.add_constraint(Constraint::eq(pairs - edges, 0.0, "edges").with_priority(1).one_sided());
            }
        }
        Ok(p)
    }

    pub fn oracle(&self) -> Result<OracleResult, ProblemError> {
        self.graph.validate_simple()?;
        let n = self.graph.n;
        check_space(space(2, n))?;
        let adj = self.graph.adjacency();
        let mut best = Best::default();
        for z in 0..1u64 << n {
            let members = bits_of(z, n);
            let size = members.iter().filter(|&&b| b).count();
            let clique = (0..n).all(|i| (i + 1..n).all(|j| !(members[i] && members[j]) || adj[i][j]));
            let value = match self.size {
                CliqueSize::Fixed(k) if clique && size == k => Some(0.0),
                CliqueSize::Maximize if clique && size >= 1 => Some(-(size as f64)),
                _ => None,
            };
            if let Some(f) = value {
                best.offer(f, || named("x", members.iter().enumerate().map(|(i, &b)| (i, b as i64))));
            }
        }
        Ok(best.finish())
    }
}
