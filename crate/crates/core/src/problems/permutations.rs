//! Permutation and scheduling problems.

use serde::{Deserialize, Serialize};

use super::{bits_of, check_space, invalid, labelings, space, Assignment, Best, GraphInput, OracleResult, ProblemError};
use crate::model::{all_different, Constraint, DiscreteVariable, Expr, ProblemInstance};

fn position_vars(p: &mut ProblemInstance, n: usize) -> Result<Vec<DiscreteVariable>, ProblemError> {
    (0..n)
        .map(|i| Ok(p.add_variable(DiscreteVariable::new(format!("v_{i}"), 1, n as i64)?)))
        .collect()
}

/// `Σ_α δ_{v_i}^α δ_{v_j}^{α+1}` with position `n + 1` wrapping to 1.
fn follows(v: &[DiscreteVariable], i: usize, j: usize) -> Expr {
    let n = v.len() as i64;
    Expr::sum((1..=n).map(|a| v[i].indicator(a) * v[j].indicator(a % n + 1)))
}

/// Adds the permutation constraint and, for missing directed links, the
/// constraint that consecutive positions be connected.
fn tour_constraints(p: &mut ProblemInstance, v: &[DiscreteVariable], linked: &dyn Fn(usize, usize) -> bool) {
    let refs: Vec<&DiscreteVariable> = v.iter().collect();
    p.add_constraint(all_different(&refs, None, "permutation"));
    let n = v.len();
    let mut broken = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && !linked(i, j) {
                broken.push(follows(v, i, j));
            }
        }
    }
    if !broken.is_empty() {
        p.add_constraint(
            Constraint::eq(Expr::sum(broken), 0.0, "connected")
                .with_priority(1)
                .one_sided(),
        );
    }
}

/// Enumerates orderings; `order[k]` is the element at position `k + 1`.
fn tour_oracle(n: usize, mut score: impl FnMut(&[usize]) -> Option<f64>) -> Result<OracleResult, ProblemError> {
    check_space(space(n, n))?;
    let mut best = Best::default();
    for order in labelings(n, n) {
        let mut seen = vec![false; n];
        if !order.iter().all(|&e| !std::mem::replace(&mut seen[e], true)) {
            continue;
        }
        if let Some(f) = score(&order) {
            best.offer(f, || {
                order
                    .iter()
                    .enumerate()
                    .map(|(pos, &e)| (format!("v_{e}"), pos as i64 + 1))
                    .collect()
            });
        }
    }
    Ok(best.finish())
}

fn cyclic_pairs(order: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..order.len()).map(move |k| (order[k], order[(k + 1) % order.len()]))
}

/// Decides whether a graph has a Hamiltonian cycle. `v_i` is the position of vertex `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianCycle {
    pub graph: GraphInput,
}

impl HamiltonianCycle {
    fn check(&self) -> Result<(), ProblemError> {
        self.graph.validate_simple()?;
        if self.graph.n < 3 {
            return invalid("a Hamiltonian cycle needs at least three vertices");
        }
        Ok(())
    }

    pub fn build(&self) -> Result<ProblemInstance, ProblemError> {
        self.check()?;
        let mut p = ProblemInstance::new("hamiltonian_cycle", "closed path through every vertex once");
        let v = position_vars(&mut p, self.graph.n)?;
        let adj = self.graph.adjacency();
        tour_constraints(&mut p, &v, &|i, j| adj[i][j]);
        Ok(p)
    }

    pub fn oracle(&self) -> Result<OracleResult, ProblemError> {
        self.check()?;
        let adj = self.graph.adjacency();
        tour_oracle(self.graph.n, |order| cyclic_pairs(order).all(|(a, b)| adj[a][b]).then_some(0.0))
    }
}

/// Travelling salesperson; `costs[i][j]` is the cost of going from `i` to
/// `j`, `null` where there is no road. The diagonal is ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tsp {
    pub costs: Vec<Vec<Option<f64>>>,
}

impl Tsp {
    fn check(&self) -> Result<usize, ProblemError> {
        let n = self.costs.len();
        if n < 3 {
            return invalid("a tour needs at least three cities");
        }
        if self.costs.iter().any(|r| r.len() != n) {
            return invalid("cost matrix must be square");
        }
        Ok(n)
    }

    fn cost(&self, i: usize, j: usize) -> Option<f64> {
        self.costs[i][j]
    }

    /// Complete symmetric instance from the upper triangle.
    pub fn symmetric(n: usize, cost: impl Fn(usize, usize) -> f64) -> Self {
        let costs = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            None
                        } else {
                            Some(cost(i.min(j), i.max(j)))
                        }
                    })
                    .collect()
            })
            .collect();
        Tsp { costs }
    }

    pub fn build(&self) -> Result<ProblemInstance, ProblemError> {
        let n = self.check()?;
        let mut p = ProblemInstance::new("tsp", "cheapest Hamiltonian cycle");
        let v = position_vars(&mut p, n)?;
        let mut legs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if let (true, Some(w)) = (i != j, self.cost(i, j)) {
                    if w != 0.0 {
                        legs.push(follows(&v, i, j) * w);
                    }
                }
            }
        }
        p.objective = Expr::sum(legs);
        tour_constraints(&mut p, &v, &|i, j| self.cost(i, j).is_some());
        Ok(p)
    }

    pub fn oracle(&self) -> Result<OracleResult, ProblemError> {
        let n = self.check()?;
        tour_oracle(n, |order| cyclic_pairs(order).map(|(a, b)| self.cost(a, b)).sum())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleObjective {
    /// Minimize the latest occupied slot through the auxiliary `tmax`.
    #[default]
    Makespan,
    /// Minimize the summed slot index of all jobs.
    Earliest,
}

/// Unit-length jobs `1..=jobs` on `machines` machines over `slots` time
/// slots. `v_m_t ∈ 0..jobs` names the job on machine `m` at slot `t` (both
/// 1-based), 0 meaning idle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MachineScheduling {
    pub machines: usize,
    pub slots: usize,
    pub jobs: usize,
    /// `(j, k)`: job `j` finishes before job `k` starts.
    #[serde(default)]
    pub precedence: Vec<(usize, usize)>,
    /// `(j1, j2)`: `j2` runs on the same machine in the slot right after `j1`.
    #[serde(default)]
    pub consecutive: Vec<(usize, usize)>,
    #[serde(default)]
    pub objective: ScheduleObjective,
}

impl MachineScheduling {
    fn check(&self) -> Result<(), ProblemError> {
        if self.machines == 0 || self.slots == 0 || self.jobs == 0 {
            return invalid("machines, slots and jobs must all be positive");
        }
        let ok = |j: usize| (1..=self.jobs).contains(&j);
        if self
            .precedence
            .iter()
            .chain(&self.consecutive)
            .any(|&(a, b)| !ok(a) || !ok(b) || a == b)
        {
            return invalid("job pairs must name two different jobs in 1..=jobs");
        }
        Ok(())
    }

    fn id(m: usize, t: usize) -> String {
        format!("v_{m}_{t}")
    }

    pub fn build(&self) -> Result<ProblemInstance, ProblemError> {
        self.check()?;
        let mut p = ProblemInstance::new("machine_scheduling", "place unit jobs on machines and time slots");
        let (mm, tt, nj) = (self.machines, self.slots, self.jobs as i64);
        let mut v = Vec::new();
        for m in 1..=mm {
            let mut row = Vec::new();
            for t in 1..=tt {
                row.push(p.add_variable(DiscreteVariable::new(Self::id(m, t), 0, nj)?));
            }
            v.push(row);
        }
        let cells = || (0..mm).flat_map(|m| (0..tt).map(move |t| (m, t)));
        let once = Expr::sum((1..=nj).map(|j| (Expr::sum(cells().map(|(m, t)| v[m][t].indicator(j))) - 1.0).pow(2)));
        p.add_constraint(Constraint::eq(once, 0.0, "assignment").one_sided());
        for &(j, k) in &self.precedence {
            let mut late = Vec::new();
            for (m, t) in cells() {
                for (m2, t2) in cells() {
                    if t >= t2 {
                        late.push(v[m][t].indicator(j as i64) * v[m2][t2].indicator(k as i64));
                    }
                }
            }
            p.add_constraint(
                Constraint::eq(Expr::sum(late), 0.0, format!("precedence_{j}_{k}"))
                    .with_priority(1)
                    .one_sided(),
            );
        }
        for &(a, b) in &self.consecutive {
            let adjacent = Expr::sum(
                (0..mm).flat_map(|m| (0..tt.saturating_sub(1)).map(move |t| (m, t)))
                    .map(|(m, t)| v[m][t].indicator(a as i64) * v[m][t + 1].indicator(b as i64)),
            );
            p.add_constraint(
                Constraint::eq(Expr::one() - adjacent, 0.0, format!("consecutive_{a}_{b}"))
                    .with_priority(1)
                    .one_sided(),
            );
        }
        let occupied = |m: usize, t: usize| Expr::one() - v[m][t].indicator(0);
        match self.objective {
            ScheduleObjective::Earliest => {
                p.objective = Expr::sum(cells().map(|(m, t)| occupied(m, t) * (t + 1) as f64));
            }
            ScheduleObjective::Makespan => {
                let tmax = p.add_variable(DiscreteVariable::new("tmax", 1, tt as i64)?.auxiliary());
                // Occupied slots later than tmax; zero exactly when every Θ factor is 1.
                let beyond = Expr::sum(cells().filter(|&(_, t)| t > 0).map(|(m, t)| {
                    occupied(m, t) * Expr::sum((1..=t as i64).map(|b| tmax.indicator(b)))
                }));
                p.add_constraint(Constraint::eq(beyond, 0.0, "makespan").with_priority(1).one_sided());
                p.objective = tmax.value();
            }
        }
        Ok(p)
    }

    pub fn oracle(&self) -> Result<OracleResult, ProblemError> {
        self.check()?;
        let cells = self.machines * self.slots;
        check_space(space(cells, self.jobs))?;
        let mut best = Best::default();
        for place in labelings(cells, self.jobs) {
            let mut used = vec![false; cells];
            if !place.iter().all(|&c| !std::mem::replace(&mut used[c], true)) {
                continue;
            }
            // Cell c is machine c / slots + 1 at slot c % slots + 1.
            let slot = |j: usize| place[j - 1] % self.slots + 1;
            let machine = |j: usize| place[j - 1] / self.slots;
            if self.precedence.iter().any(|&(j, k)| slot(j) >= slot(k)) {
                continue;
            }
            if self
                .consecutive
                .iter()
                .any(|&(a, b)| machine(a) != machine(b) || slot(b) != slot(a) + 1)
            {
                continue;
            }
            let slots = (1..=self.jobs).map(slot);
            let f = match self.objective {
                ScheduleObjective::Makespan => slots.max().unwrap_or(0) as f64,
                ScheduleObjective::Earliest => slots.sum::<usize>() as f64,
            };
            best.offer(f, || {
                let mut a: Assignment = (0..cells)
                    .map(|c| (Self::id(c / self.slots + 1, c % self.slots + 1), 0))
                    .collect();
                for (j, &c) in place.iter().enumerate() {
                    a.insert(Self::id(c / self.slots + 1, c % self.slots + 1), j as i64 + 1);
                }
                a
            });
        }
        Ok(best.finish())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NurseMode {
    /// Objective `Σ_t (Σ_i p_i v_{i,t} − n_t)²`.
    #[default]
    Combined,
    /// Objective `Σ v_{i,t}` with hard minimum workload per shift.
    ShiftCount,
}

/// Roster of `nurses` over `shifts`; `v_i_t = 1` when nurse `i` works shift `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NurseScheduling {
    pub nurses: usize,
    pub shifts: usize,
    pub powers: Vec<i64>,
    pub min_workload: Vec<i64>,
    /// Longest allowed run of consecutive shifts.
    #[serde(default)]
    pub d_max: Option<usize>,
    #[serde(default)]
    pub mode: NurseMode,
    /// Require equal shift counts for all nurses.
    #[serde(default)]
    pub balance: bool,
}

impl NurseScheduling {
    fn check(&self) -> Result<(), ProblemError> {
        if self.powers.len() != self.nurses || self.min_workload.len() != self.shifts {
            return invalid("need one power per nurse and one minimum workload per shift");
        }
        if self.d_max == Some(0) {
            return invalid("d_max must be at least 1");
        }
        Ok(())
    }

    fn id(i: usize, t: usize) -> String {
        format!("v_{i}_{t}")
    }

    pub fn build(&self) -> Result<ProblemInstance, ProblemError> {
        self.check()?;
        let mut p = ProblemInstance::new("nurse_scheduling", "cover every shift with minimal workload");
        let mut v = Vec::new();
        for i in 0..self.nurses {
            let row: Result<Vec<_>, ProblemError> = (0..self.shifts)
                .map(|t| Ok(p.add_variable(DiscreteVariable::new(Self::id(i, t), 0, 1)?)))
                .collect();
            v.push(row?);
        }
        let load = |t: usize| Expr::sum((0..self.nurses).map(|i| v[i][t].value() * self.powers[i] as f64));
        match self.mode {
            NurseMode::Combined => {
                p.objective = Expr::sum((0..self.shifts).map(|t| (load(t) - self.min_workload[t] as f64).pow(2)));
            }
            NurseMode::ShiftCount => {
                p.objective = Expr::sum(v.iter().flatten().map(DiscreteVariable::value));
                for t in 0..self.shifts {
                    p.add_constraint(Constraint::le(-load(t), -self.min_workload[t] as f64, format!("workload_{t}")));
                }
            }
        }
        if let Some(d) = self.d_max.filter(|&d| d < self.shifts) {
            for (i, row) in v.iter().enumerate() {
                let runs = Expr::sum((0..self.shifts - d).map(|t| Expr::prod(row[t..=t + d].iter().map(|x| x.value()))));
                p.add_constraint(Constraint::eq(runs, 0.0, format!("consecutive_{i}")).one_sided());
            }
        }
        if self.balance {
            let count = |i: usize| Expr::sum(v[i].iter().map(DiscreteVariable::value));
            let mut gaps = Vec::new();
            for i in 0..self.nurses {
                for j in i + 1..self.nurses {
                    gaps.push((count(i) - count(j)).pow(2));
                }
            }
            p.add_constraint(Constraint::eq(Expr::sum(gaps), 0.0, "balance").with_priority(1).one_sided());
        }
        Ok(p)
    }

    pub fn oracle(&self) -> Result<OracleResult, ProblemError> {
        self.check()?;
        let (n, d) = (self.nurses, self.shifts);
        check_space(space(2, n * d))?;
        let mut best = Best::default();
        for z in 0..1u64 << (n * d) {
            let bits = bits_of(z, n * d);
            let works = |i: usize, t: usize| bits[i * d + t];
            let load = |t: usize| (0..n).filter(|&i| works(i, t)).map(|i| self.powers[i]).sum::<i64>();
            if let Some(dm) = self.d_max {
                let too_long = (0..n).any(|i| {
                    let mut run = 0;
                    (0..d).any(|t| {
                        run = if works(i, t) { run + 1 } else { 0 };
                        run > dm
                    })
                });
                if too_long {
                    continue;
                }
            }
            if self.balance {
                let counts: Vec<usize> = (0..n).map(|i| (0..d).filter(|&t| works(i, t)).count()).collect();
                if counts.iter().any(|&c| c != counts[0]) {
                    continue;
                }
            }
            let f = match self.mode {
                NurseMode::Combined => (0..d).map(|t| ((load(t) - self.min_workload[t]) as f64).powi(2)).sum(),
                NurseMode::ShiftCount => {
                    if (0..d).any(|t| load(t) < self.min_workload[t]) {
                        continue;
                    }
                    bits.iter().filter(|&&b| b).count() as f64
                }
            };
            best.offer(f, || {
                (0..n)
                    .flat_map(|i| (0..d).map(move |t| (i, t)))
                    .map(|(i, t)| (Self::id(i, t), works(i, t) as i64))
                    .collect()
            });
        }
        Ok(best.finish())
    }
}
