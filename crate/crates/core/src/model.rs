//! Encoding-independent problem representation: discrete variables,
//! expressions over value and indicator atoms, constraints, and the standard
//! building blocks used by the problem library.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Assignment of integer values to variable ids.
pub type Assignment = BTreeMap<String, i64>;

/// Product of domain sizes up to which bounds are computed by enumeration.
pub const ENUMERATION_LIMIT: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("variable `{id}` has empty range {lo}..={hi}")]
    EmptyRange { id: String, lo: i64, hi: i64 },
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` has no value in the assignment")]
    Unassigned(String),
    #[error("value {value} of `{id}` is outside {lo}..={hi}")]
    OutOfRange { id: String, value: i64, lo: i64, hi: i64 },
    #[error("inequality `{label}` is infeasible: bound {bound} does not exceed the minimum {min} of the left side")]
    InfeasibleInequality { label: String, bound: i64, min: i64 },
    #[error("constraint `{label}`: {reason}")]
    InvalidConstraint { label: String, reason: String },
    #[error("invalid discretization: {0}")]
    InvalidDiscretization(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarRole {
    /// Part of the problem's answer; checked against oracles.
    #[default]
    Primary,
    /// Introduced by the formulation; its value is implied by the primary ones.
    Auxiliary,
}

/// Integer variable over the inclusive range `lo..=hi`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteVariable {
    pub id: String,
    pub lo: i64,
    pub hi: i64,
    #[serde(default)]
    pub role: VarRole,
    /// Slack variables only ever appear as `y = c`, so values outside the
    /// attainable range of `c` may be added freely.
    #[serde(default)]
    pub slack: bool,
}

impl DiscreteVariable {
    pub fn new(id: impl Into<String>, lo: i64, hi: i64) -> Result<Self, ModelError> {
        let id = id.into();
        if hi < lo {
            return Err(ModelError::EmptyRange { id, lo, hi });
        }
        Ok(DiscreteVariable {
            id,
            lo,
            hi,
            role: VarRole::Primary,
            slack: false,
        })
    }

    /// Same variable marked auxiliary.
    pub fn auxiliary(mut self) -> Self {
        self.role = VarRole::Auxiliary;
        self
    }

    pub fn size(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn contains(&self, value: i64) -> bool {
        (self.lo..=self.hi).contains(&value)
    }

    pub fn values(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }

    pub fn is_primary(&self) -> bool {
        self.role == VarRole::Primary
    }

    /// Value expression `v`.
    pub fn value(&self) -> Expr {
        Expr::value(&self.id)
    }

    /// Indicator `δ_v^α`, or the constant 0 when `α` is out of range.
    pub fn indicator(&self, alpha: i64) -> Expr {
        if self.contains(alpha) {
            Expr::indicator(&self.id, alpha)
        } else {
            Expr::zero()
        }
    }
}

/// Expression tree over variable values and value indicators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expr {
    Const { value: f64 },
    Value { var: String },
    Indicator { var: String, alpha: i64 },
    Sum { terms: Vec<Expr> },
    Prod { factors: Vec<Expr> },
    Pow { base: Box<Expr>, exp: u32 },
    /// `scale · inner + offset`.
    Affine { inner: Box<Expr>, scale: f64, offset: f64 },
}

impl Expr {
    pub fn constant(value: f64) -> Expr {
        Expr::Const { value }
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    pub fn value(var: &str) -> Expr {
        Expr::Value {
            var: var.to_string(),
        }
    }

    pub fn indicator(var: &str, alpha: i64) -> Expr {
        Expr::Indicator {
            var: var.to_string(),
            alpha,
        }
    }

    /// Flattened sum; the empty sum is 0.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut flat = Vec::new();
        for t in terms {
            match t {
                Expr::Sum { terms } => flat.extend(terms),
                Expr::Const { value } if value == 0.0 => {}
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Expr::zero(),
            1 => flat.pop().unwrap(),
            _ => Expr::Sum { terms: flat },
        }
    }

    /// Flattened product; the empty product is 1 and a literal zero factor collapses it.
    pub fn prod<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut flat = Vec::new();
        for f in factors {
            match f {
                Expr::Prod { factors } => flat.extend(factors),
                Expr::Const { value } if value == 1.0 => {}
                Expr::Const { value } if value == 0.0 => return Expr::zero(),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Expr::one(),
            1 => flat.pop().unwrap(),
            _ => Expr::Prod { factors: flat },
        }
    }

    pub fn pow(self, exp: u32) -> Expr {
        match exp {
            0 => Expr::one(),
            1 => self,
            _ => Expr::Pow {
                base: Box::new(self),
                exp,
            },
        }
    }

    pub fn affine(self, scale: f64, offset: f64) -> Expr {
        if let Expr::Const { value } = self {
            return Expr::constant(scale * value + offset);
        }
        Expr::Affine {
            inner: Box::new(self),
            scale,
            offset,
        }
    }

    pub fn is_zero_constant(&self) -> bool {
        matches!(self, Expr::Const { value } if *value == 0.0)
    }

    /// Names of all variables referenced in the tree.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const { .. } => {}
            Expr::Value { var } | Expr::Indicator { var, .. } => {
                out.insert(var.clone());
            }
            Expr::Sum { terms } => terms.iter().for_each(|t| t.collect_variables(out)),
            Expr::Prod { factors } => factors.iter().for_each(|f| f.collect_variables(out)),
            Expr::Pow { base, .. } => base.collect_variables(out),
            Expr::Affine { inner, .. } => inner.collect_variables(out),
        }
    }

    /// Evaluates without range checks; missing variables are an error.
    pub fn eval(&self, a: &Assignment) -> Result<f64, ModelError> {
        Ok(match self {
            Expr::Const { value } => *value,
            Expr::Value { var } => *a
                .get(var)
                .ok_or_else(|| ModelError::Unassigned(var.clone()))? as f64,
            Expr::Indicator { var, alpha } => {
                let v = a.get(var).ok_or_else(|| ModelError::Unassigned(var.clone()))?;
                if v == alpha {
                    1.0
                } else {
                    0.0
                }
            }
            Expr::Sum { terms } => {
                let mut s = 0.0;
                for t in terms {
                    s += t.eval(a)?;
                }
                s
            }
            Expr::Prod { factors } => {
                let mut p = 1.0;
                for f in factors {
                    p *= f.eval(a)?;
                    if p == 0.0 {
                        break;
                    }
                }
                p
            }
            Expr::Pow { base, exp } => base.eval(a)?.powi(*exp as i32),
            Expr::Affine {
                inner,
                scale,
                offset,
            } => scale * inner.eval(a)? + offset,
        })
    }

    /// Interval bounds by interval arithmetic over the declared ranges.
    pub fn interval(&self, vars: &BTreeMap<&str, &DiscreteVariable>) -> Result<(f64, f64), ModelError> {
        Ok(match self {
            Expr::Const { value } => (*value, *value),
            Expr::Value { var } => {
                let v = vars
                    .get(var.as_str())
                    .ok_or_else(|| ModelError::UnknownVariable(var.clone()))?;
                (v.lo as f64, v.hi as f64)
            }
            Expr::Indicator { var, alpha } => {
                let v = vars
                    .get(var.as_str())
                    .ok_or_else(|| ModelError::UnknownVariable(var.clone()))?;
                if !v.contains(*alpha) {
                    (0.0, 0.0)
                } else if v.size() == 1 {
                    (1.0, 1.0)
                } else {
                    (0.0, 1.0)
                }
            }
            Expr::Sum { terms } => {
                let mut lo = 0.0;
                let mut hi = 0.0;
                for t in terms {
                    let (a, b) = t.interval(vars)?;
                    lo += a;
                    hi += b;
                }
                (lo, hi)
            }
            Expr::Prod { factors } => {
                let mut acc = (1.0, 1.0);
                for f in factors {
                    let (a, b) = f.interval(vars)?;
                    let c = [acc.0 * a, acc.0 * b, acc.1 * a, acc.1 * b];
                    acc = (
                        c.iter().copied().fold(f64::INFINITY, f64::min),
                        c.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    );
                }
                acc
            }
            Expr::Pow { base, exp } => {
                let (a, b) = base.interval(vars)?;
                let e = *exp as i32;
                let (pa, pb) = (a.powi(e), b.powi(e));
                if e % 2 == 0 {
                    if a <= 0.0 && b >= 0.0 {
                        (0.0, pa.max(pb))
                    } else {
                        (pa.min(pb), pa.max(pb))
                    }
                } else {
                    (pa, pb)
                }
            }
            Expr::Affine {
                inner,
                scale,
                offset,
            } => {
                let (a, b) = inner.interval(vars)?;
                let (x, y) = (scale * a + offset, scale * b + offset);
                (x.min(y), x.max(y))
            }
        })
    }

    /// Exact range by enumeration when the involved domains are small enough,
    /// otherwise the interval-arithmetic bounds.
    pub fn bounds(&self, vars: &BTreeMap<&str, &DiscreteVariable>) -> Result<(f64, f64), ModelError> {
        let involved: Vec<&DiscreteVariable> = self
            .variables()
            .iter()
            .map(|id| {
                vars.get(id.as_str())
                    .copied()
                    .ok_or_else(|| ModelError::UnknownVariable(id.clone()))
            })
            .collect::<Result<_, _>>()?;
        let space = involved
            .iter()
            .try_fold(1u64, |acc, v| acc.checked_mul(v.size() as u64));
        match space {
            Some(n) if n <= ENUMERATION_LIMIT => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for a in assignments(&involved) {
                    let x = self.eval(&a)?;
                    lo = lo.min(x);
                    hi = hi.max(x);
                }
                Ok((lo, hi))
            }
            _ => self.interval(vars),
        }
    }
}

impl From<f64> for Expr {
    fn from(value: f64) -> Expr {
        Expr::constant(value)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::sum([self, rhs])
    }
}

impl Add<f64> for Expr {
    type Output = Expr;
    fn add(self, rhs: f64) -> Expr {
        Expr::sum([self, Expr::constant(rhs)])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sum([self, -rhs])
    }
}

impl Sub<f64> for Expr {
    type Output = Expr;
    fn sub(self, rhs: f64) -> Expr {
        Expr::sum([self, Expr::constant(-rhs)])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::prod([self, rhs])
    }
}

impl Mul<f64> for Expr {
    type Output = Expr;
    fn mul(self, rhs: f64) -> Expr {
        if rhs == 0.0 {
            return Expr::zero();
        }
        self.affine(rhs, 0.0)
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.affine(-1.0, 0.0)
    }
}

/// All assignments of the given variables, first variable varying slowest.
pub fn assignments<'a>(vars: &'a [&'a DiscreteVariable]) -> impl Iterator<Item = Assignment> + 'a {
    let total: u64 = vars.iter().map(|v| v.size() as u64).product();
    (0..total).map(move |mut z| {
        let mut a = Assignment::new();
        for v in vars.iter().rev() {
            let s = v.size() as u64;
            a.insert(v.id.clone(), v.lo + (z % s) as i64);
            z /= s;
        }
        a
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Eq,
    Le,
}

/// `lhs relation rhs`; lower priority numbers are harder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub lhs: Expr,
    pub relation: Relation,
    pub rhs: f64,
    pub label: String,
    #[serde(default)]
    pub priority: u32,
    /// Declares `lhs ≥ rhs` on every assignment that satisfies all harder
    /// constraints, which permits the linear penalty `lhs − rhs`.
    #[serde(default)]
    pub one_sided: bool,
}

impl Constraint {
    pub fn eq(lhs: Expr, rhs: f64, label: impl Into<String>) -> Self {
        Constraint {
            lhs,
            relation: Relation::Eq,
            rhs,
            label: label.into(),
            priority: 0,
            one_sided: false,
        }
    }

    pub fn le(lhs: Expr, rhs: f64, label: impl Into<String>) -> Self {
        Constraint {
            relation: Relation::Le,
            ..Constraint::eq(lhs, rhs, label)
        }
    }

    pub fn with_priority(mut self, priority: u32) -> Self {
        self.priority = priority;
        self
    }

    pub fn one_sided(mut self) -> Self {
        self.one_sided = true;
        self
    }

    /// Amount by which the assignment violates the constraint (0 when satisfied).
    pub fn violation(&self, a: &Assignment) -> Result<f64, ModelError> {
        let d = self.lhs.eval(a)? - self.rhs;
        Ok(match self.relation {
            Relation::Eq => d.abs(),
            Relation::Le => d.max(0.0),
        })
    }

    pub fn is_satisfied(&self, a: &Assignment) -> Result<bool, ModelError> {
        Ok(self.violation(a)? < 1e-9)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
}

/// Variables, objective (minimized) and constraints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    #[serde(default)]
    pub metadata: Metadata,
    pub variables: Vec<DiscreteVariable>,
    pub objective: Expr,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
}

impl ProblemInstance {
    pub fn new(name: impl Into<String>, description: impl Into<String>) -> Self {
        ProblemInstance {
            metadata: Metadata {
                name: name.into(),
                description: description.into(),
            },
            variables: Vec::new(),
            objective: Expr::zero(),
            constraints: Vec::new(),
        }
    }

    /// Adds a variable and returns a copy of it for building expressions.
    pub fn add_variable(&mut self, v: DiscreteVariable) -> DiscreteVariable {
        self.variables.push(v.clone());
        v
    }

    pub fn add_constraint(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn variable(&self, id: &str) -> Option<&DiscreteVariable> {
        self.variables.iter().find(|v| v.id == id)
    }

    pub fn variable_table(&self) -> BTreeMap<&str, &DiscreteVariable> {
        self.variables.iter().map(|v| (v.id.as_str(), v)).collect()
    }

    pub fn primary_variables(&self) -> impl Iterator<Item = &DiscreteVariable> {
        self.variables.iter().filter(|v| v.is_primary())
    }

    /// An id starting with `prefix` that is not yet declared.
    pub fn fresh_id(&self, prefix: &str) -> String {
        if self.variable(prefix).is_none() {
            return prefix.to_string();
        }
        (1..)
            .map(|k| format!("{prefix}_{k}"))
            .find(|id| self.variable(id).is_none())
            .unwrap()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let mut seen = BTreeSet::new();
        for v in &self.variables {
            if v.hi < v.lo {
                return Err(ModelError::EmptyRange {
                    id: v.id.clone(),
                    lo: v.lo,
                    hi: v.hi,
                });
            }
            if !seen.insert(v.id.as_str()) {
                return Err(ModelError::DuplicateVariable(v.id.clone()));
            }
        }
        let declared = |e: &Expr| -> Result<(), ModelError> {
            match e.variables().into_iter().find(|id| !seen.contains(id.as_str())) {
                Some(id) => Err(ModelError::UnknownVariable(id)),
                None => Ok(()),
            }
        };
        declared(&self.objective)?;
        for c in &self.constraints {
            declared(&c.lhs)?;
            if c.relation == Relation::Le && c.rhs.fract() != 0.0 {
                return Err(ModelError::InvalidConstraint {
                    label: c.label.clone(),
                    reason: format!("inequality bound {} is not an integer", c.rhs),
                });
            }
        }
        Ok(())
    }

    /// Checks that `a` assigns every variable an in-range value.
    pub fn check_assignment(&self, a: &Assignment) -> Result<(), ModelError> {
        for v in &self.variables {
            let value = *a
                .get(&v.id)
                .ok_or_else(|| ModelError::Unassigned(v.id.clone()))?;
            if !v.contains(value) {
                return Err(ModelError::OutOfRange {
                    id: v.id.clone(),
                    value,
                    lo: v.lo,
                    hi: v.hi,
                });
            }
        }
        Ok(())
    }

    pub fn eval_objective(&self, a: &Assignment) -> Result<f64, ModelError> {
        eval_expr(&self.objective, a, &self.variables)
    }

    pub fn is_feasible(&self, a: &Assignment) -> Result<bool, ModelError> {
        for c in &self.constraints {
            if !c.is_satisfied(a)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Evaluates `e` after checking that every referenced variable is assigned in range.
pub fn eval_expr(e: &Expr, a: &Assignment, vars: &[DiscreteVariable]) -> Result<f64, ModelError> {
    for id in e.variables() {
        let v = vars
            .iter()
            .find(|v| v.id == id)
            .ok_or_else(|| ModelError::UnknownVariable(id.clone()))?;
        let value = *a.get(&id).ok_or_else(|| ModelError::Unassigned(id.clone()))?;
        if !v.contains(value) {
            return Err(ModelError::OutOfRange {
                id,
                value,
                lo: v.lo,
                hi: v.hi,
            });
        }
    }
    e.eval(a)
}

/// Number of variables taking the value `alpha`.
pub fn element_count(vars: &[&DiscreteVariable], alpha: i64) -> Expr {
    Expr::sum(vars.iter().map(|v| v.indicator(alpha)))
}

/// `Θ(v − w)`: 1 iff `v ≥ w`.
pub fn step(v: &DiscreteVariable, w: &DiscreteVariable) -> Expr {
    let mut terms = Vec::new();
    for alpha in w.values() {
        let above: Vec<Expr> = v.values().filter(|&b| b >= alpha).map(|b| v.indicator(b)).collect();
        if !above.is_empty() {
            terms.push(w.indicator(alpha) * Expr::sum(above));
        }
    }
    Expr::sum(terms)
}

/// 0 iff `l` is at least every `v_i`, else 1.
pub fn min_max_penalty(l: &DiscreteVariable, vars: &[&DiscreteVariable]) -> Expr {
    if vars.is_empty() {
        return Expr::zero();
    }
    Expr::one() - Expr::prod(vars.iter().map(|v| step(l, v)))
}

/// 1 iff `v = w`.
pub fn equal_indicator(v: &DiscreteVariable, w: &DiscreteVariable) -> Expr {
    let lo = v.lo.max(w.lo);
    let hi = v.hi.min(w.hi);
    Expr::sum((lo..=hi).map(|a| v.indicator(a) * w.indicator(a)))
}

/// `Σ_{i≠j} A_ij δ(v_i − v_j) = 0` over ordered pairs; `adjacency` defaults to all ones.
pub fn all_different(
    vars: &[&DiscreteVariable],
    adjacency: Option<&[Vec<bool>]>,
    label: impl Into<String>,
) -> Constraint {
    let mut terms = Vec::new();
    for (i, vi) in vars.iter().enumerate() {
        for (j, vj) in vars.iter().enumerate() {
            let linked = adjacency.is_none_or(|a| a[i][j]);
            if i != j && linked {
                terms.push(equal_indicator(vi, vj));
            }
        }
    }
    Constraint::eq(Expr::sum(terms), 0.0, label).one_sided()
}

/// `∏_i (1 − δ_{v_i}^α)`: 0 iff some variable takes the value `alpha`.
pub fn value_used(vars: &[&DiscreteVariable], alpha: i64) -> Expr {
    Expr::prod(vars.iter().map(|v| Expr::one() - v.indicator(alpha)))
}

/// Penalizes values above `bound`, by 1 or by the value itself when `weighted`.
pub fn upper_bound_penalty(v: &DiscreteVariable, bound: i64, weighted: bool) -> Expr {
    Expr::sum(v.values().filter(|&a| a > bound).map(|a| {
        let d = v.indicator(a);
        if weighted {
            d * a as f64
        } else {
            d
        }
    }))
}

/// Rewrites `c < bound` as a fresh slack variable `y ∈ [c_min, bound − 1]`
/// with the constraint `y − c = 0`. The caller registers `y`.
pub fn inequality_to_aux(
    c: &Expr,
    bound: i64,
    vars: &BTreeMap<&str, &DiscreteVariable>,
    aux_id: &str,
    label: &str,
) -> Result<(DiscreteVariable, Constraint), ModelError> {
    let (lo, hi) = c.bounds(vars)?;
    let c_min = (lo - 1e-9).ceil() as i64;
    if bound <= c_min {
        return Err(ModelError::InfeasibleInequality {
            label: label.to_string(),
            bound,
            min: c_min,
        });
    }
    if lo.fract().abs() > 1e-9 || hi.fract().abs() > 1e-9 {
        log::warn!("inequality `{label}` has a non-integer bound range [{lo}, {hi}]");
    }
    let mut y = DiscreteVariable::new(aux_id, c_min, bound - 1)?.auxiliary();
    y.slack = true;
    let constraint = Constraint::eq(y.value() - c.clone(), 0.0, label);
    Ok((y, constraint))
}

pub fn bool_not(x: Expr) -> Expr {
    Expr::one() - x
}

pub fn bool_and<I: IntoIterator<Item = Expr>>(xs: I) -> Expr {
    Expr::prod(xs)
}

pub fn bool_or<I: IntoIterator<Item = Expr>>(xs: I) -> Expr {
    Expr::one() - Expr::prod(xs.into_iter().map(bool_not))
}

pub fn bool_implies(a: Expr, b: Expr) -> Expr {
    Expr::one() - a.clone() + a * b
}

/// Pairwise `a + b − 2ab`, folded over the inputs.
pub fn bool_xor<I: IntoIterator<Item = Expr>>(xs: I) -> Expr {
    xs.into_iter()
        .reduce(|a, b| a.clone() + b.clone() - (a * b) * 2.0)
        .unwrap_or_else(Expr::zero)
}

/// Maps an integer level of a discretized real axis back to a real value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealDecoder {
    pub start: f64,
    pub precision: f64,
}

impl RealDecoder {
    /// Interval `[(k−1)q + a, kq + a)` covered by level `k`.
    pub fn interval(&self, level: i64) -> (f64, f64) {
        let k = level as f64;
        (
            (k - 1.0) * self.precision + self.start,
            k * self.precision + self.start,
        )
    }

    /// Midpoint of the level's interval.
    pub fn decode(&self, level: i64) -> f64 {
        let (a, b) = self.interval(level);
        0.5 * (a + b)
    }
}

/// Variable with levels `1..=⌈(b − a)/q⌉` covering `[a, b]`.
pub fn discretize_real(
    id: &str,
    range: (f64, f64),
    precision: f64,
) -> Result<(DiscreteVariable, RealDecoder), ModelError> {
    let (a, b) = range;
    if !(precision > 0.0) || !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(ModelError::InvalidDiscretization(format!(
            "range [{a}, {b}] with precision {precision}"
        )));
    }
    let levels = ((b - a) / precision - 1e-9).ceil().max(1.0) as i64;
    Ok((
        DiscreteVariable::new(id, 1, levels)?,
        RealDecoder {
            start: a,
            precision,
        },
    ))
}
