//! Ground-state search on compiled Hamiltonians: exhaustive enumeration,
//! optionally restricted to the exported-constraint subspace, simulated
//! annealing, and verification against problem oracles.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compiler::{flip_gain_bound, CompiledHamiltonian};
use crate::model::{Assignment, ProblemInstance, Relation};
use crate::poly::{SpinPolynomial, MAX_TABLE_SPINS};
use crate::problems::OracleResult;

/// Default enumeration cap.
pub const DEFAULT_MAX_SPINS: usize = 24;

/// Energies within this distance of the minimum count as degenerate.
pub const ENERGY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("{spins} spins exceed the enumeration cap of {cap}")]
    TooManySpins { spins: usize, cap: usize },
    #[error("no state satisfies the exported constraints")]
    EmptySubspace,
    #[error("invalid annealing schedule: {0}")]
    InvalidSchedule(String),
}

fn bits(state: &[bool]) -> String {
    state.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

mod state_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(state: &[bool], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::bits(state))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let text = String::deserialize(d)?;
        text.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(serde::de::Error::custom(format!("invalid state bit `{other}`"))),
            })
            .collect()
    }
}

/// One spin state with its energy and decoding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub energy: f64,
    /// Character `i` is the bit of spin `i`; `1` is `s = +1`.
    #[serde(with = "state_string")]
    pub state: Vec<bool>,
    pub assignment: BTreeMap<String, Option<i64>>,
    pub feasible: bool,
    /// Number of states sharing the minimal energy.
    pub degeneracy: u64,
}

impl Solution {
    fn new(h: &CompiledHamiltonian, state: Vec<bool>, degeneracy: u64) -> Self {
        let energy = h.total.evaluate_unchecked(&state);
        let assignment = h.decode(&state);
        let feasible = assignment.values().all(Option::is_some)
            && h.penalties_satisfied(&state)
            && h.exported_satisfied(&state);
        Solution {
            energy,
            state,
            assignment,
            feasible,
            degeneracy,
        }
    }

    pub fn state_string(&self) -> String {
        bits(&self.state)
    }

    /// Assignment when every register decoded.
    pub fn complete_assignment(&self) -> Option<Assignment> {
        self.assignment
            .iter()
            .map(|(k, v)| v.map(|x| (k.clone(), x)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExhaustiveOptions {
    pub restrict_to_exported: bool,
    pub max_spins: usize,
    /// Upper bound on returned co-minimal states; `degeneracy` still counts all.
    pub max_solutions: usize,
}

impl Default for ExhaustiveOptions {
    fn default() -> Self {
        ExhaustiveOptions {
            restrict_to_exported: false,
            max_spins: DEFAULT_MAX_SPINS,
            max_solutions: 1 << 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExhaustiveResult {
    /// Co-minimal states sorted by bit string; their energies agree within
    /// [`ENERGY_TOLERANCE`].
    pub solutions: Vec<Solution>,
    pub ground_energy: f64,
    pub degeneracy: u64,
    /// States inside the searched space (all `2^n`, or the exported subspace).
    pub states_searched: u64,
}

/// Enumerates all `2^n` states (or only those meeting every exported
/// constraint) and returns the co-minimal ones.
pub fn solve_exhaustive(h: &CompiledHamiltonian, opts: &ExhaustiveOptions) -> Result<ExhaustiveResult, SolveError> {
    let n = h.num_spins;
    let cap = opts.max_spins.min(MAX_TABLE_SPINS);
    if n > cap {
        return Err(SolveError::TooManySpins { spins: n, cap });
    }
    let table = h.total.energy_table(n).expect("spins are dense below num_spins");
    let mask: Option<Vec<bool>> = if opts.restrict_to_exported && !h.exported.is_empty() {
        let mut valid = vec![true; table.len()];
        for c in &h.exported {
            let ct = c.poly.energy_table(n).expect("spins are dense below num_spins");
            valid
                .par_iter_mut()
                .zip(ct.par_iter())
                .for_each(|(v, &e)| *v &= (e - c.target).abs() < ENERGY_TOLERANCE);
        }
        Some(valid)
    } else {
        None
    };
    let allowed = |z: usize| mask.as_ref().is_none_or(|m| m[z]);
    let states_searched = match &mask {
        Some(m) => m.par_iter().filter(|&&v| v).count() as u64,
        None => table.len() as u64,
    };
    if states_searched == 0 {
        return Err(SolveError::EmptySubspace);
    }
    let min = (0..table.len())
        .into_par_iter()
        .filter(|&z| allowed(z))
        .map(|z| table[z])
        .reduce(|| f64::INFINITY, f64::min);
    let tol = ENERGY_TOLERANCE * min.abs().max(1.0);
    let mut ground: Vec<usize> = (0..table.len())
        .into_par_iter()
        .filter(|&z| allowed(z) && table[z] <= min + tol)
        .collect();
    let degeneracy = ground.len() as u64;
    let to_state = |z: usize| -> Vec<bool> { (0..n).map(|i| z >> i & 1 == 1).collect() };
    // Lexicographic order of the bit string puts spin 0 first.
    ground.sort_by_key(|&z| to_state(z));
    ground.truncate(opts.max_solutions);
    let solutions: Vec<Solution> = ground
        .into_iter()
        .map(|z| Solution::new(h, to_state(z), degeneracy))
        .collect();
    // Direct evaluation is more accurate than the transformed table.
    let ground_energy = solutions.iter().map(|s| s.energy).reduce(f64::min).unwrap_or(min);
    Ok(ExhaustiveResult {
        solutions,
        ground_energy,
        degeneracy,
        states_searched,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaOptions {
    pub t_initial: f64,
    pub t_final: f64,
    pub sweeps: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl SaOptions {
    /// Schedule scaled to the Hamiltonian's largest single-flip change.
    pub fn for_hamiltonian(h: &CompiledHamiltonian, seed: u64) -> Self {
        let t0 = flip_gain_bound(&h.total).max(1e-3);
        SaOptions {
            t_initial: t0,
            t_final: 1e-3 * t0,
            sweeps: 1000,
            restarts: 8,
            seed,
        }
    }
}

struct FlipModel {
    coeffs: Vec<f64>,
    members: Vec<Vec<usize>>,
    incident: Vec<Vec<usize>>,
}

impl FlipModel {
    fn new(p: &SpinPolynomial, n: usize) -> Self {
        let mut coeffs = Vec::new();
        let mut members = Vec::new();
        let mut incident = vec![Vec::new(); n];
        for (m, c) in p.non_constant_terms() {
            let t = coeffs.len();
            coeffs.push(c);
            members.push(m.indices().to_vec());
            for &i in m.indices() {
                incident[i].push(t);
            }
        }
        FlipModel {
            coeffs,
            members,
            incident,
        }
    }

    /// Energy change of flipping spin `i`.
    fn delta(&self, spins: &[f64], i: usize) -> f64 {
        -2.0 * self.incident[i]
            .iter()
            .map(|&t| self.coeffs[t] * self.members[t].iter().map(|&j| spins[j]).product::<f64>())
            .sum::<f64>()
    }
}

/// Simulated annealing with single flips, Metropolis acceptance and
/// geometric cooling. Restarts run in parallel with seeds derived from
/// `seed`, so the result is reproducible.
pub fn solve_sa(h: &CompiledHamiltonian, opts: &SaOptions) -> Result<Solution, SolveError> {
    if opts.restarts == 0 {
        return Err(SolveError::InvalidSchedule("restarts must be at least 1".into()));
    }
    if opts.sweeps == 0 {
        return Err(SolveError::InvalidSchedule("sweeps must be at least 1".into()));
    }
    if !(opts.t_initial > 0.0 && opts.t_final > 0.0 && opts.t_final <= opts.t_initial) {
        return Err(SolveError::InvalidSchedule(format!(
            "temperatures must satisfy 0 < t_final ≤ t_initial, got {} and {}",
            opts.t_final, opts.t_initial
        )));
    }
    let n = h.num_spins;
    let model = FlipModel::new(&h.total, n);
    let ratio = if opts.sweeps > 1 {
        (opts.t_final / opts.t_initial).powf(1.0 / (opts.sweeps - 1) as f64)
    } else {
        1.0
    };
    let runs: Vec<(f64, Vec<bool>)> = (0..opts.restarts as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ r.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut spins: Vec<f64> = (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
            let to_bits = |s: &[f64]| s.iter().map(|&x| x > 0.0).collect::<Vec<bool>>();
            let mut energy = h.total.evaluate_unchecked(&to_bits(&spins));
            let mut best = (energy, to_bits(&spins));
            let mut t = opts.t_initial;
            for _ in 0..opts.sweeps {
                for i in 0..n {
                    let d = model.delta(&spins, i);
                    if d <= 0.0 || rng.gen::<f64>() < (-d / t).exp() {
                        spins[i] = -spins[i];
                        energy += d;
                        if energy < best.0 - ENERGY_TOLERANCE {
                            best = (energy, to_bits(&spins));
                        }
                    }
                }
                t *= ratio;
            }
            let exact = h.total.evaluate_unchecked(&best.1);
            (exact, best.1)
        })
        .collect();
    let (_, state) = runs
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
        .expect("at least one restart");
    Ok(Solution::new(h, state, 1))
}

/// Per-solution outcome of [`verify`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionCheck {
    pub state: String,
    pub objective: Option<f64>,
    pub feasible: bool,
    pub is_witness: bool,
    /// Violation amount per constraint label.
    pub residuals: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub oracle_feasible: bool,
    pub hamiltonian_feasible: bool,
    pub oracle_optimum: Option<f64>,
    pub checks: Vec<SolutionCheck>,
    pub failures: Vec<String>,
}

/// Checks that every solution decodes to an oracle witness with the oracle's
/// objective value. For infeasible instances it checks that no solution is
/// feasible.
pub fn verify(
    p: &ProblemInstance,
    h: &CompiledHamiltonian,
    solutions: &[Solution],
    oracle: &OracleResult,
) -> VerificationReport {
    let mut failures = Vec::new();
    let mut checks = Vec::new();
    for sol in solutions {
        let tag = sol.state_string();
        let recomputed = h.total.evaluate_unchecked(&sol.state);
        if recomputed != sol.energy {
            failures.push(format!("state {tag}: recorded energy {} but the Hamiltonian gives {recomputed}", sol.energy));
        }
        let full = sol.complete_assignment();
        let mut residuals = BTreeMap::new();
        let mut objective = None;
        let mut feasible = false;
        let mut is_witness = false;
        match &full {
            None => {
                let bad: Vec<&str> = sol
                    .assignment
                    .iter()
                    .filter(|(_, v)| v.is_none())
                    .map(|(k, _)| k.as_str())
                    .collect();
                failures.push(format!("state {tag}: invalid register for {}", bad.join(", ")));
            }
            Some(a) => {
                feasible = true;
                for c in &p.constraints {
                    let r = c.violation(a).unwrap_or(f64::INFINITY);
                    if r > 1e-9 {
                        feasible = false;
                        if oracle.feasible {
                            let rel = if c.relation == Relation::Le { "≤" } else { "=" };
                            failures.push(format!(
                                "state {tag}: constraint `{}` violated (lhs {rel} {} misses by {r})",
                                c.label, c.rhs
                            ));
                        }
                    }
                    residuals.insert(c.label.clone(), r);
                }
                objective = p.eval_objective(a).ok();
                let primary: Assignment = p
                    .primary_variables()
                    .filter_map(|v| a.get(&v.id).map(|x| (v.id.clone(), *x)))
                    .collect();
                is_witness = oracle.witnesses.contains(&primary);
                if oracle.feasible {
                    if feasible && !is_witness {
                        failures.push(format!("state {tag}: decoded assignment is not an optimal witness"));
                    }
                    if let (Some(found), Some(best)) = (objective, oracle.optimum) {
                        if feasible && (found - best).abs() > 1e-9 {
                            failures.push(format!("state {tag}: objective {found} differs from optimum {best}"));
                        }
                    }
                }
            }
        }
        checks.push(SolutionCheck {
            state: tag,
            objective,
            feasible,
            is_witness,
            residuals,
        });
    }
    let hamiltonian_feasible = checks.iter().any(|c| c.feasible);
    if solutions.is_empty() {
        failures.push("no solutions to verify".into());
    }
    if !oracle.feasible && hamiltonian_feasible {
        failures.push("oracle reports no feasible assignment but a ground state is feasible".into());
    }
    VerificationReport {
        passed: failures.is_empty(),
        oracle_feasible: oracle.feasible,
        hamiltonian_feasible,
        oracle_optimum: oracle.optimum,
        checks,
        failures,
    }
}
