//! Input detection and flag parsing.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::Value;
use spinforge::compiler::{core_label, CompiledHamiltonian, ConstraintMode, PenaltyPolicy};
use spinforge::encodings::{glob_match, EncodingPlan, EncodingSpec};
use spinforge::model::{ProblemInstance, Relation};
use spinforge::poly::SpinPolynomial;
use spinforge::problems::ProblemSpec;
use spinforge::solve::DEFAULT_MAX_SPINS;

use crate::failure::Failure;
use crate::CommonArgs;

pub const MAX_SPINS_VAR: &str = "SPINFORGE_MAX_SPINS";

pub enum Source {
    /// A model, with the generator it came from when there is one.
    Problem {
        spec: Option<ProblemSpec>,
        instance: ProblemInstance,
    },
    Compiled(CompiledHamiltonian),
    Polynomial(SpinPolynomial),
}

impl Source {
    pub fn kind(&self) -> &'static str {
        match self {
            Source::Problem { spec: Some(_), .. } => "problem",
            Source::Problem { spec: None, .. } => "model instance",
            Source::Compiled(_) => "compiled Hamiltonian",
            Source::Polynomial(_) => "spin polynomial",
        }
    }
}

/// Deserializes with the JSON path of the offending field in the message.
fn typed<T: DeserializeOwned>(text: &str, what: &str) -> Result<T, Failure> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            Failure::Input(format!("invalid {what}: {inner}"))
        } else {
            Failure::Input(format!("invalid {what} at `{path}`: {inner}"))
        }
    })
}

pub fn load(path: &Path) -> Result<Source, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("{} is not valid JSON: {e}", path.display())))?;
    let Some(obj) = value.as_object() else {
        return Err(Failure::Input(format!("{}: expected a JSON object", path.display())));
    };
    if obj.contains_key("problem") {
        let spec: ProblemSpec = typed(&text, "problem")?;
        let instance = spec.build()?;
        Ok(Source::Problem {
            spec: Some(spec),
            instance,
        })
    } else if obj.contains_key("var_map") {
        Ok(Source::Compiled(CompiledHamiltonian::from_json(value)?))
    } else if obj.contains_key("variables") {
        let instance: ProblemInstance = typed(&text, "model instance")?;
        instance
            .validate()
            .map_err(|e| Failure::Input(format!("invalid model instance: {e}")))?;
        Ok(Source::Problem { spec: None, instance })
    } else if obj.contains_key("terms") {
        Ok(Source::Polynomial(typed(&text, "polynomial")?))
    } else {
        Err(Failure::Input(format!(
            "{}: cannot tell the input kind; expected a `problem`, `variables`, `var_map` or `terms` key",
            path.display()
        )))
    }
}

fn split_pair<'a>(flag: &str, raw: &'a str) -> Result<(&'a str, &'a str), Failure> {
    match raw.split_once('=') {
        Some((k, v)) if !k.is_empty() && !v.is_empty() => Ok((k, v)),
        _ => Err(Failure::Input(format!("--{flag} expects KEY=VALUE, got `{raw}`"))),
    }
}

/// Ids the compiler will create for `p`, slack registers included.
fn variable_ids(p: &ProblemInstance) -> Vec<String> {
    let mut ids: Vec<String> = p.variables.iter().map(|v| v.id.clone()).collect();
    for c in p.constraints.iter().filter(|c| c.relation == Relation::Le) {
        ids.push(format!("slack:{}", c.label));
    }
    ids
}

pub fn encoding_plan(args: &CommonArgs, p: &ProblemInstance) -> Result<EncodingPlan, Failure> {
    let mut plan = EncodingPlan::default();
    for raw in &args.encodings {
        let (pattern, kind) = split_pair("encoding", raw)?;
        let spec: EncodingSpec = kind
            .parse()
            .map_err(|e| Failure::Input(format!("--encoding {raw}: {e}")))?;
        plan = plan.with(pattern, spec);
    }
    let ids = variable_ids(p);
    let unknown = plan.unmatched_patterns(ids.iter().map(String::as_str));
    if !unknown.is_empty() {
        return Err(Failure::Input(format!(
            "--encoding names unknown variable(s): {}",
            unknown.join(", ")
        )));
    }
    Ok(plan)
}

/// Labels that `--constraint-mode` and `--weight` may refer to.
fn penalty_labels(p: &ProblemInstance) -> BTreeSet<String> {
    let mut labels: BTreeSet<String> = p.constraints.iter().map(|c| c.label.clone()).collect();
    labels.extend(variable_ids(p).iter().map(|id| core_label(id)));
    labels
}

fn check_labels<'a>(flag: &str, patterns: impl Iterator<Item = &'a str>, labels: &BTreeSet<String>) -> Result<(), Failure> {
    for pattern in patterns {
        if !labels.iter().any(|l| glob_match(pattern, l)) {
            return Err(Failure::Input(format!("--{flag}: no constraint matches `{pattern}`")));
        }
    }
    Ok(())
}

fn parse_weight(raw: &str) -> Result<(&str, f64), Failure> {
    let (label, w) = split_pair("weight", raw)?;
    let w: f64 = w
        .parse()
        .map_err(|_| Failure::Input(format!("--weight {raw}: `{w}` is not a number")))?;
    if !(w.is_finite() && w > 0.0) {
        return Err(Failure::Input(format!("--weight {raw}: weights must be positive")));
    }
    Ok((label, w))
}

pub fn penalty_policy(args: &CommonArgs, p: &ProblemInstance) -> Result<PenaltyPolicy, Failure> {
    let labels = penalty_labels(p);
    let mut policy = PenaltyPolicy::default();
    for raw in &args.modes {
        let (label, mode) = split_pair("constraint-mode", raw)?;
        let mode: ConstraintMode = mode
            .parse()
            .map_err(|e: String| Failure::Input(format!("--constraint-mode {raw}: {e}")))?;
        policy = policy.with_mode(label, mode);
    }
    for raw in &args.weights {
        let (label, w) = parse_weight(raw)?;
        policy = policy.with_weight(label, w);
    }
    check_labels("constraint-mode", policy.modes.iter().map(|(p, _)| p.as_str()), &labels)?;
    check_labels("weight", policy.weights.iter().map(|(p, _)| p.as_str()), &labels)?;
    Ok(policy)
}

/// Applies `--weight` overrides to an already compiled Hamiltonian.
pub fn reweight(args: &CommonArgs, h: CompiledHamiltonian) -> Result<CompiledHamiltonian, Failure> {
    if args.weights.is_empty() {
        return Ok(h);
    }
    let labels: BTreeSet<String> = h.penalties.iter().map(|t| t.label.clone()).collect();
    let mut weights = h.weights();
    for raw in &args.weights {
        let (pattern, w) = parse_weight(raw)?;
        check_labels("weight", std::iter::once(pattern), &labels)?;
        for (t, slot) in h.penalties.iter().zip(weights.iter_mut()) {
            if glob_match(pattern, &t.label) {
                *slot = w;
            }
        }
    }
    Ok(h.reweighted(&weights))
}

/// Rejects compile-time flags on inputs that are already Hamiltonians.
pub fn reject_compile_flags(args: &CommonArgs, kind: &str, allow_weights: bool) -> Result<(), Failure> {
    let mut given = Vec::new();
    if !args.encodings.is_empty() {
        given.push("--encoding");
    }
    if !args.modes.is_empty() {
        given.push("--constraint-mode");
    }
    if !allow_weights && !args.weights.is_empty() {
        given.push("--weight");
    }
    if given.is_empty() {
        Ok(())
    } else {
        Err(Failure::Input(format!("{} cannot be applied to a {kind}", given.join(" and "))))
    }
}

pub fn max_spins() -> Result<usize, Failure> {
    match std::env::var(MAX_SPINS_VAR) {
        Err(_) => Ok(DEFAULT_MAX_SPINS),
        Ok(raw) => raw
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("{MAX_SPINS_VAR}=`{raw}` is not a spin count"))),
    }
}
