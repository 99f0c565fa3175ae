//! Lowering of problem instances to spin Hamiltonians.
//!
//! Expressions are lowered by substituting each variable's value and
//! indicator polynomials. Constraints become weighted penalties or exported
//! sum constraints, inequalities are rewritten through slack variables, and
//! penalty weights follow a flip-cost versus flip-gain rule across priority
//! levels.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encodings::{encode, glob_match, EncodedVariable, EncodingError, EncodingPlan, EncodingSpec};
use crate::model::{
    inequality_to_aux, Assignment, Constraint, DiscreteVariable, Expr, ModelError, ProblemInstance,
    Relation, VarRole,
};
use crate::poly::{BooleanPolynomial, Monomial, ResourceStats, SpinIndex, SpinPolynomial};

/// Penalties over at most this many spins get their flip cost by enumeration.
pub const EXACT_COST_SPINS: usize = 20;

/// Weights above this are treated as a failure of the heuristic.
const MAX_WEIGHT: f64 = 1e12;

/// Tolerance for deciding that a polynomial constraint holds at a state.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error("expression refers to unencoded variable `{0}`")]
    UnknownVariable(String),
    #[error("penalty weight for `{label}` is unusable: {reason}")]
    Weight { label: String, reason: String },
    #[error("malformed compiled Hamiltonian: {0}")]
    Malformed(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintMode {
    /// Added to the energy with a weight.
    Penalty,
    /// Kept out of the energy as an unsquared sum constraint.
    Export,
}

impl FromStr for ConstraintMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "penalty" => Ok(ConstraintMode::Penalty),
            "export" => Ok(ConstraintMode::Export),
            other => Err(format!("unknown constraint mode `{other}`")),
        }
    }
}

/// How constraints and cores are enforced, and with which weights.
#[derive(Clone, Debug, PartialEq)]
pub struct PenaltyPolicy {
    pub default_mode: ConstraintMode,
    pub core_mode: ConstraintMode,
    /// Label patterns with their mode; later entries win.
    pub modes: Vec<(String, ConstraintMode)>,
    /// Label patterns with a fixed weight; later entries win.
    pub weights: Vec<(String, f64)>,
    pub safety: f64,
}

impl Default for PenaltyPolicy {
    fn default() -> Self {
        PenaltyPolicy {
            default_mode: ConstraintMode::Penalty,
            core_mode: ConstraintMode::Penalty,
            modes: Vec::new(),
            weights: Vec::new(),
            safety: 1.1,
        }
    }
}

impl PenaltyPolicy {
    /// Every constraint and core exported.
    pub fn export_all() -> Self {
        PenaltyPolicy {
            default_mode: ConstraintMode::Export,
            core_mode: ConstraintMode::Export,
            ..PenaltyPolicy::default()
        }
    }

    pub fn with_mode(mut self, pattern: impl Into<String>, mode: ConstraintMode) -> Self {
        self.modes.push((pattern.into(), mode));
        self
    }

    pub fn with_weight(mut self, pattern: impl Into<String>, weight: f64) -> Self {
        self.weights.push((pattern.into(), weight));
        self
    }

    pub fn mode_for(&self, label: &str, is_core: bool) -> ConstraintMode {
        self.modes
            .iter()
            .rev()
            .find(|(p, _)| glob_match(p, label))
            .map(|(_, m)| *m)
            .unwrap_or(if is_core {
                self.core_mode
            } else {
                self.default_mode
            })
    }

    pub fn weight_for(&self, label: &str) -> Option<f64> {
        self.weights
            .iter()
            .rev()
            .find(|(p, _)| glob_match(p, label))
            .map(|(_, w)| *w)
    }
}

/// Label of the core term of variable `id`.
pub fn core_label(id: &str) -> String {
    format!("core:{id}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyTerm {
    pub label: String,
    pub weight: f64,
    /// 0 for cores, `1 + priority` for constraints; lower is harder.
    pub level: u32,
    pub poly: SpinPolynomial,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExportedConstraint {
    pub label: String,
    pub poly: SpinPolynomial,
    pub target: f64,
}

impl ExportedConstraint {
    pub fn is_satisfied(&self, state: &[bool]) -> bool {
        (self.poly.evaluate_unchecked(state) - self.target).abs() < CONSTRAINT_TOLERANCE
    }
}

/// Result of [`compile`]: objective, weighted penalties, exported sum
/// constraints and the variable map, over spins `0..num_spins`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompiledHamiltonian {
    pub num_spins: usize,
    pub objective: SpinPolynomial,
    pub penalties: Vec<PenaltyTerm>,
    pub exported: Vec<ExportedConstraint>,
    pub variables: Vec<EncodedVariable>,
    /// `objective + Σ weight · penalty`.
    pub total: SpinPolynomial,
}

impl CompiledHamiltonian {
    /// Wraps a bare polynomial: no variables, penalties or exports.
    pub fn from_polynomial(p: SpinPolynomial) -> Self {
        CompiledHamiltonian {
            num_spins: p.max_index().map_or(0, |m| m + 1),
            objective: p.clone(),
            penalties: Vec::new(),
            exported: Vec::new(),
            variables: Vec::new(),
            total: p,
        }
    }

    pub fn variable(&self, id: &str) -> Option<&EncodedVariable> {
        self.variables.iter().find(|v| v.id() == id)
    }

    /// Decoded value of every variable; `None` marks an invalid register.
    pub fn decode(&self, state: &[bool]) -> BTreeMap<String, Option<i64>> {
        self.variables
            .iter()
            .map(|v| (v.id().to_string(), v.decode(state)))
            .collect()
    }

    /// Full assignment when every register is valid.
    pub fn decode_complete(&self, state: &[bool]) -> Option<Assignment> {
        self.variables
            .iter()
            .map(|v| v.decode(state).map(|x| (v.id().to_string(), x)))
            .collect()
    }

    /// Assignment restricted to primary variables, when all registers are valid.
    pub fn decode_primary(&self, state: &[bool]) -> Option<Assignment> {
        self.variables
            .iter()
            .filter(|v| v.variable.role == VarRole::Primary)
            .map(|v| v.decode(state).map(|x| (v.id().to_string(), x)))
            .collect()
    }

    pub fn penalties_satisfied(&self, state: &[bool]) -> bool {
        self.penalties
            .iter()
            .all(|p| p.poly.evaluate_unchecked(state).abs() < CONSTRAINT_TOLERANCE)
    }

    pub fn exported_satisfied(&self, state: &[bool]) -> bool {
        self.exported.iter().all(|c| c.is_satisfied(state))
    }

    pub fn stats(&self) -> ResourceStats {
        self.total.stats()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.penalties.iter().map(|p| p.weight).collect()
    }

    /// Replaces the penalty weights (in order) and rebuilds the total.
    pub fn reweighted(&self, weights: &[f64]) -> CompiledHamiltonian {
        assert_eq!(weights.len(), self.penalties.len(), "one weight per penalty");
        let mut out = self.clone();
        for (p, &w) in out.penalties.iter_mut().zip(weights) {
            p.weight = w;
        }
        out.total = assemble_total(&out.objective, &out.penalties);
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(HamiltonianWire::from(self)).expect("Hamiltonian serializes")
    }

    pub fn from_json(value: serde_json::Value) -> Result<Self, CompileError> {
        let wire: HamiltonianWire =
            serde_json::from_value(value).map_err(|e| CompileError::Malformed(e.to_string()))?;
        wire.try_into()
    }
}

fn assemble_total(objective: &SpinPolynomial, penalties: &[PenaltyTerm]) -> SpinPolynomial {
    let mut total = objective.clone();
    for p in penalties {
        total += p.poly.scale(p.weight);
    }
    total
}

#[derive(Serialize, Deserialize)]
struct VarMapEntry {
    id: String,
    lo: i64,
    hi: i64,
    #[serde(default)]
    role: VarRole,
    #[serde(default)]
    slack: bool,
    #[serde(flatten)]
    encoding: EncodingSpec,
    spins: Vec<SpinIndex>,
}

#[derive(Serialize, Deserialize)]
struct HamiltonianWire {
    #[serde(flatten)]
    total: SpinPolynomial,
    num_spins: usize,
    objective: SpinPolynomial,
    penalties: Vec<PenaltyTerm>,
    exported: Vec<ExportedConstraint>,
    var_map: Vec<VarMapEntry>,
}

impl From<&CompiledHamiltonian> for HamiltonianWire {
    fn from(h: &CompiledHamiltonian) -> Self {
        HamiltonianWire {
            total: h.total.clone(),
            num_spins: h.num_spins,
            objective: h.objective.clone(),
            penalties: h.penalties.clone(),
            exported: h.exported.clone(),
            var_map: h
                .variables
                .iter()
                .map(|v| VarMapEntry {
                    id: v.variable.id.clone(),
                    lo: v.variable.lo,
                    hi: v.variable.hi,
                    role: v.variable.role,
                    slack: v.variable.slack,
                    encoding: v.spec.clone(),
                    spins: v.spins.clone(),
                })
                .collect(),
        }
    }
}

impl TryFrom<HamiltonianWire> for CompiledHamiltonian {
    type Error = CompileError;

    fn try_from(w: HamiltonianWire) -> Result<Self, CompileError> {
        let mut variables = Vec::with_capacity(w.var_map.len());
        for e in w.var_map {
            let mut v = DiscreteVariable::new(e.id, e.lo, e.hi)?;
            v.role = e.role;
            v.slack = e.slack;
            let mut next = e.spins.first().copied().unwrap_or(0);
            let ev = encode(&v, &e.encoding, &mut next)?;
            if ev.spins != e.spins {
                return Err(CompileError::Malformed(format!(
                    "spins of `{}` do not match its {} register",
                    v.id, e.encoding
                )));
            }
            variables.push(ev);
        }
        let h = CompiledHamiltonian {
            num_spins: w.num_spins,
            objective: w.objective,
            penalties: w.penalties,
            exported: w.exported,
            variables,
            total: w.total,
        };
        if h.total.max_index().is_some_and(|m| m >= h.num_spins) {
            return Err(CompileError::Malformed("total refers to spins beyond num_spins".into()));
        }
        Ok(h)
    }
}

/// Substitutes encoded value and indicator polynomials into `e`.
pub fn lower_expression(
    e: &Expr,
    vars: &BTreeMap<&str, &EncodedVariable>,
) -> Result<SpinPolynomial, CompileError> {
    let lookup = |var: &str| {
        vars.get(var)
            .copied()
            .ok_or_else(|| CompileError::UnknownVariable(var.to_string()))
    };
    Ok(match e {
        Expr::Const { value } => SpinPolynomial::constant(*value),
        Expr::Value { var } => lookup(var)?.value_poly.clone(),
        Expr::Indicator { var, alpha } => lookup(var)?.indicator(*alpha),
        Expr::Sum { terms } => {
            let mut out = SpinPolynomial::zero();
            for t in terms {
                out += lower_expression(t, vars)?;
            }
            out
        }
        Expr::Prod { factors } => {
            let mut out = SpinPolynomial::constant(1.0);
            for f in factors {
                out = &out * &lower_expression(f, vars)?;
                if out.is_zero() {
                    break;
                }
            }
            out
        }
        Expr::Pow { base, exp } => lower_expression(base, vars)?.pow(*exp),
        Expr::Affine {
            inner,
            scale,
            offset,
        } => lower_expression(inner, vars)?.scale(*scale) + *offset,
    })
}

/// Lowers `p` under `plan`, enforcing constraints according to `policy`.
pub fn compile(
    p: &ProblemInstance,
    plan: &EncodingPlan,
    policy: &PenaltyPolicy,
) -> Result<CompiledHamiltonian, CompileError> {
    p.validate()?;
    let mut variables: Vec<DiscreteVariable> = p.variables.clone();
    let mut constraints: Vec<Constraint> = Vec::new();
    for c in &p.constraints {
        match c.relation {
            Relation::Eq => constraints.push(c.clone()),
            Relation::Le => {
                let table: BTreeMap<&str, &DiscreteVariable> =
                    variables.iter().map(|v| (v.id.as_str(), v)).collect();
                let (_, hi) = c.lhs.bounds(&table)?;
                if hi <= c.rhs + 1e-9 {
                    log::info!("inequality `{}` always holds and is dropped", c.label);
                    continue;
                }
                let taken: BTreeSet<&str> = table.keys().copied().collect();
                let base = format!("slack:{}", c.label);
                let aux_id = std::iter::once(base.clone())
                    .chain((1..).map(|k| format!("{base}_{k}")))
                    .find(|id| !taken.contains(id.as_str()))
                    .unwrap();
                let (y, mut eq) =
                    inequality_to_aux(&c.lhs, c.rhs.round() as i64 + 1, &table, &aux_id, &c.label)?;
                eq.priority = c.priority;
                variables.push(y);
                constraints.push(eq);
            }
        }
    }

    // Binary and Gray slack registers absorb unused codewords by extending the
    // range downward, which is harmless because `y = c` pins the value.
    for v in variables.iter_mut().filter(|v| v.slack) {
        let spec = plan.spec_for(v);
        if matches!(spec, EncodingSpec::Binary | EncodingSpec::Gray) {
            let cap = spec.capacity(v.size()) as i64;
            v.lo = v.hi - cap + 1;
        }
    }

    let mut next = 0;
    let mut encoded = Vec::with_capacity(variables.len());
    for v in &variables {
        encoded.push(encode(v, plan.spec_for(v), &mut next)?);
    }
    let table: BTreeMap<&str, &EncodedVariable> = encoded.iter().map(|e| (e.id(), e)).collect();
    let var_table: BTreeMap<&str, &DiscreteVariable> =
        variables.iter().map(|v| (v.id.as_str(), v)).collect();

    let objective = lower_expression(&p.objective, &table)?;
    let mut penalties = Vec::new();
    let mut exported = Vec::new();

    for ev in &encoded {
        let Some(core) = &ev.core else { continue };
        let label = core_label(ev.id());
        match policy.mode_for(&label, true) {
            ConstraintMode::Penalty => penalties.push(PenaltyTerm {
                label,
                weight: 1.0,
                level: 0,
                poly: core.penalty.clone(),
            }),
            ConstraintMode::Export => exported.push(ExportedConstraint {
                label,
                poly: core.sum.clone(),
                target: core.target,
            }),
        }
    }

    for c in &constraints {
        match policy.mode_for(&c.label, false) {
            ConstraintMode::Penalty => penalties.push(PenaltyTerm {
                label: c.label.clone(),
                weight: 1.0,
                level: 1 + c.priority,
                poly: penalty_polynomial(c, &var_table, &table)?,
            }),
            ConstraintMode::Export => exported.push(ExportedConstraint {
                label: c.label.clone(),
                poly: lower_expression(&c.lhs, &table)?,
                target: c.rhs,
            }),
        }
    }

    let overrides: Vec<Option<f64>> = penalties.iter().map(|t| policy.weight_for(&t.label)).collect();
    for (t, w) in penalties.iter().zip(&overrides) {
        if let Some(w) = w {
            if !(w.is_finite() && *w > 0.0) {
                return Err(CompileError::Weight {
                    label: t.label.clone(),
                    reason: format!("explicit weight {w} is not positive"),
                });
            }
        }
    }
    let levels: Vec<(u32, &SpinPolynomial)> = penalties.iter().map(|t| (t.level, &t.poly)).collect();
    let labels: Vec<&str> = penalties.iter().map(|t| t.label.as_str()).collect();
    let weights = heuristic_weights_labeled(&objective, &levels, &overrides, policy.safety, &labels)?;
    for (t, w) in penalties.iter_mut().zip(weights) {
        t.weight = w;
    }
    let total = assemble_total(&objective, &penalties);
    Ok(CompiledHamiltonian {
        num_spins: next,
        objective,
        penalties,
        exported,
        variables: encoded,
        total,
    })
}

/// Linear form `lhs − rhs` when its sign is certified, else `(lhs − rhs)²`.
fn penalty_polynomial(
    c: &Constraint,
    vars: &BTreeMap<&str, &DiscreteVariable>,
    encoded: &BTreeMap<&str, &EncodedVariable>,
) -> Result<SpinPolynomial, CompileError> {
    let diff = c.lhs.clone().affine(1.0, -c.rhs);
    let form = if c.one_sided {
        diff
    } else {
        let (lo, hi) = diff.bounds(vars)?;
        if lo >= -CONSTRAINT_TOLERANCE {
            diff
        } else if hi <= CONSTRAINT_TOLERANCE {
            -diff
        } else {
            diff.pow(2)
        }
    };
    lower_expression(&form, encoded)
}

/// Upper bound `2 · max_i Σ_{T∋i} |c_T|` on the energy change of one spin flip.
pub fn flip_gain_bound(p: &SpinPolynomial) -> f64 {
    let mut per_spin: BTreeMap<SpinIndex, f64> = BTreeMap::new();
    for (m, c) in p.non_constant_terms() {
        for &i in m.indices() {
            *per_spin.entry(i).or_insert(0.0) += c.abs();
        }
    }
    2.0 * per_spin.values().copied().fold(0.0, f64::max)
}

/// Smallest positive energy increase caused by one spin flip, over all
/// states. Exact by enumeration up to [`EXACT_COST_SPINS`] spins, otherwise
/// the bound `2 · min |c_T|`. `None` for constant polynomials.
pub fn min_flip_cost(p: &SpinPolynomial) -> Option<f64> {
    let spins = p.variables();
    if spins.is_empty() {
        return None;
    }
    if spins.len() > EXACT_COST_SPINS {
        log::warn!(
            "penalty over {} spins is too large for exact flip costs; using the coefficient bound",
            spins.len()
        );
        let min = p
            .non_constant_terms()
            .map(|(_, c)| c.abs())
            .fold(f64::INFINITY, f64::min);
        return Some(2.0 * min);
    }
    let position: BTreeMap<SpinIndex, usize> = spins.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let local = p.relabel(|i| position[&i]);
    let n = spins.len();
    let table = local.energy_table(n).expect("small register");
    let mut best = f64::INFINITY;
    for (z, &e) in table.iter().enumerate() {
        for b in 0..n {
            let d = table[z ^ (1 << b)] - e;
            if d > CONSTRAINT_TOLERANCE && d < best {
                best = d;
            }
        }
    }
    best.is_finite().then_some(best)
}

/// Weights for penalties grouped by level (lower is harder). Walking from the
/// softest level to the hardest, each penalty gets
/// `safety · gain(softer) / cost(penalty)` where `gain` is the flip-gain
/// bound of the weighted sum of everything softer, objective included, and
/// `cost` its minimum single-flip increase. Explicit overrides are kept.
pub fn heuristic_weights(
    objective: &SpinPolynomial,
    penalties: &[(u32, &SpinPolynomial)],
    overrides: &[Option<f64>],
    safety: f64,
) -> Result<Vec<f64>, CompileError> {
    let labels: Vec<String> = (0..penalties.len()).map(|k| format!("penalty #{k}")).collect();
    let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
    heuristic_weights_labeled(objective, penalties, overrides, safety, &labels)
}

fn heuristic_weights_labeled(
    objective: &SpinPolynomial,
    penalties: &[(u32, &SpinPolynomial)],
    overrides: &[Option<f64>],
    safety: f64,
    labels: &[&str],
) -> Result<Vec<f64>, CompileError> {
    assert_eq!(penalties.len(), overrides.len());
    let mut weights = vec![1.0; penalties.len()];
    let levels: BTreeSet<u32> = penalties.iter().map(|(l, _)| *l).collect();
    let mut softer = objective.clone();
    for &level in levels.iter().rev() {
        let gain = flip_gain_bound(&softer);
        let mut this_level = SpinPolynomial::zero();
        for (k, (l, poly)) in penalties.iter().enumerate() {
            if *l != level {
                continue;
            }
            let w = match overrides[k] {
                Some(w) => w,
                None if gain == 0.0 => 1.0,
                None => match min_flip_cost(poly) {
                    Some(cost) => safety * gain / cost,
                    None => 1.0,
                },
            };
            if !w.is_finite() || w <= 0.0 || w > MAX_WEIGHT {
                return Err(CompileError::Weight {
                    label: labels[k].to_string(),
                    reason: format!("derived weight {w} (gain {gain}) is out of range"),
                });
            }
            weights[k] = w;
            this_level += poly.scale(w);
        }
        softer += this_level;
    }
    Ok(weights)
}

/// Order-two polynomial equivalent to an input under ancilla minimization.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadratized {
    pub poly: SpinPolynomial,
    /// Ancilla spin ids, in creation order.
    pub ancillas: Vec<SpinIndex>,
    /// Replaced pairs `(a, b)` with their ancilla `y = x_a x_b`.
    pub substitutions: Vec<(SpinIndex, SpinIndex, SpinIndex)>,
}

impl Quadratized {
    /// Total spins: the original register plus ancillas.
    pub fn num_spins(&self) -> usize {
        self.poly.max_index().map_or(0, |m| m + 1)
    }

    pub fn two_body_terms(&self) -> usize {
        self.poly.non_constant_terms().filter(|(m, _)| m.order() == 2).count()
    }
}

/// Reduces `p` to order two by repeated pair substitution in the boolean
/// domain. The most frequent pair among terms of order ≥ 3 is replaced by an
/// ancilla `y` with the penalty `M (x_a x_b − 2 y (x_a + x_b) + 3 y)`,
/// `M = 1 + Σ |c|` over the current non-constant terms.
pub fn quadratize(p: &SpinPolynomial) -> Quadratized {
    let mut b = p.to_boolean();
    let mut next = p.max_index().map_or(0, |m| m + 1);
    let mut ancillas = Vec::new();
    let mut substitutions = Vec::new();
    loop {
        let mut counts: BTreeMap<(SpinIndex, SpinIndex), usize> = BTreeMap::new();
        for (m, _) in b.terms().filter(|(m, _)| m.order() >= 3) {
            let idx = m.indices();
            for i in 0..idx.len() {
                for j in i + 1..idx.len() {
                    *counts.entry((idx[i], idx[j])).or_insert(0) += 1;
                }
            }
        }
        // Highest count wins; BTreeMap order makes the lowest pair win ties.
        let Some((&(a, c), _)) = counts
            .iter()
            .fold(None, |best: Option<(&(usize, usize), &usize)>, cur| match best {
                Some(b) if b.1 >= cur.1 => Some(b),
                _ => Some(cur),
            })
        else {
            break;
        };
        let big_m = 1.0 + b.l1_norm();
        let y = next;
        next += 1;
        let mut out = BooleanPolynomial::zero();
        for (m, coeff) in b.terms() {
            if m.order() >= 3 && m.contains(a) && m.contains(c) {
                let rest = m.indices().iter().copied().filter(|&i| i != a && i != c);
                out.add_term(Monomial::bool_product(rest.chain([y])), coeff);
            } else {
                out.add_term(m.clone(), coeff);
            }
        }
        out.add_term(Monomial::bool_product([a, c]), big_m);
        out.add_term(Monomial::bool_product([a, y]), -2.0 * big_m);
        out.add_term(Monomial::bool_product([c, y]), -2.0 * big_m);
        out.add_term(Monomial::single(y), 3.0 * big_m);
        b = out;
        ancillas.push(y);
        substitutions.push((a, c, y));
    }
    Quadratized {
        poly: b.to_spin(),
        ancillas,
        substitutions,
    }
}
