use proptest::prelude::*;
use spinforge::compiler::*;
use spinforge::encodings::{EncodingPlan, EncodingSpec};
use spinforge::model::{assignments, Assignment, Constraint, DiscreteVariable, Expr, ProblemInstance};
use spinforge::poly::{Monomial, SpinPolynomial};
use spinforge::problems::reference_instances;

const TOL: f64 = 1e-7;

fn plans() -> Vec<EncodingPlan> {
    vec![
        EncodingPlan::uniform(EncodingSpec::Binary),
        EncodingPlan::uniform(EncodingSpec::OneHot),
        EncodingPlan::uniform(EncodingSpec::DomainWall),
        EncodingPlan::uniform(EncodingSpec::Unary),
    ]
}

/// Spin states encoding `a`, one per choice of values for the slack variables.
fn encoded_states(h: &CompiledHamiltonian, a: &Assignment) -> Vec<Vec<bool>> {
    let mut states = vec![vec![false; h.num_spins]];
    for ev in &h.variables {
        let values: Vec<i64> = match a.get(ev.id()) {
            Some(&v) => vec![v],
            None => ev.variable.values().collect(),
        };
        let mut grown = Vec::new();
        for s in &states {
            for &v in &values {
                let mut s = s.clone();
                for (bit, &i) in ev.encode_value(v).unwrap().iter().zip(&ev.spins) {
                    s[i] = *bit;
                }
                grown.push(s);
            }
        }
        states = grown;
    }
    states
}

fn native_assignments(p: &ProblemInstance) -> Vec<Assignment> {
    let refs: Vec<&DiscreteVariable> = p.variables.iter().collect();
    assignments(&refs).collect()
}

#[test]
fn lowered_objective_matches_native_objective() {
    for (name, spec) in reference_instances() {
        let p = spec.build().unwrap();
        for plan in plans() {
            let h = compile(&p, &plan, &PenaltyPolicy::default()).unwrap();
            for a in native_assignments(&p) {
                let want = p.eval_objective(&a).unwrap();
                for s in encoded_states(&h, &a) {
                    let got = h.objective.evaluate(&s).unwrap();
                    assert!((got - want).abs() < TOL, "{name}/{}: {a:?} gives {got}, not {want}", plan.default);
                }
            }
        }
    }
}

#[test]
fn penalties_vanish_exactly_on_feasible_assignments() {
    for (name, spec) in reference_instances() {
        let p = spec.build().unwrap();
        for plan in plans() {
            let h = compile(&p, &plan, &PenaltyPolicy::default()).unwrap();
            for a in native_assignments(&p) {
                let feasible = p.is_feasible(&a).unwrap();
                let zero_somewhere = encoded_states(&h, &a).iter().any(|s| {
                    h.penalties
                        .iter()
                        .all(|t| t.poly.evaluate(s).unwrap().abs() < TOL)
                });
                assert_eq!(zero_somewhere, feasible, "{name}/{}: {a:?}", plan.default);
            }
        }
    }
}

#[test]
fn exported_constraints_hold_exactly_on_feasible_assignments() {
    for (name, spec) in reference_instances() {
        let p = spec.build().unwrap();
        let h = compile(&p, &EncodingPlan::uniform(EncodingSpec::OneHot), &PenaltyPolicy::export_all()).unwrap();
        assert!(h.penalties.is_empty(), "{name}");
        assert_eq!(h.total, h.objective);
        for a in native_assignments(&p) {
            let feasible = p.is_feasible(&a).unwrap();
            let holds = encoded_states(&h, &a).iter().any(|s| h.exported_satisfied(s));
            assert_eq!(holds, feasible, "{name}: {a:?}");
        }
    }
}

#[test]
fn weighted_total_is_objective_plus_penalties() {
    for (name, spec) in reference_instances() {
        let p = spec.build().unwrap();
        let h = compile(&p, &EncodingPlan::default(), &PenaltyPolicy::default()).unwrap();
        let mut sum = h.objective.clone();
        for t in &h.penalties {
            assert!(t.weight > 0.0 && t.weight.is_finite(), "{name}: {}", t.label);
            sum += t.poly.scale(t.weight);
        }
        let diff = &sum - &h.total;
        assert!(diff.terms().all(|(_, c)| c.abs() < 1e-9), "{name}");
    }
}

fn two_var_problem() -> ProblemInstance {
    let mut p = ProblemInstance::new("pair", "");
    let a = p.add_variable(DiscreteVariable::new("a", 0, 3).unwrap());
    let b = p.add_variable(DiscreteVariable::new("b", 0, 3).unwrap());
    p.objective = -(a.value() + b.value());
    p.add_constraint(Constraint::le(a.value() + b.value(), 4.0, "cap"));
    p.add_constraint(Constraint::eq(a.indicator(0), 0.0, "nonzero").with_priority(2));
    p
}

#[test]
fn inequalities_get_named_slack_variables() {
    let h = compile(&two_var_problem(), &EncodingPlan::default(), &PenaltyPolicy::default()).unwrap();
    let slack = h.variable("slack:cap").expect("slack register");
    assert!(slack.variable.slack);
    assert!(slack.variable.hi == 4);
    let cap = h.penalties.iter().find(|t| t.label == "cap").unwrap();
    let nonzero = h.penalties.iter().find(|t| t.label == "nonzero").unwrap();
    assert_eq!((cap.level, nonzero.level), (1, 3));
}

#[test]
fn inequalities_that_always_hold_are_dropped() {
    let mut p = two_var_problem();
    p.add_constraint(Constraint::le(Expr::value("a"), 3.0, "trivial"));
    let h = compile(&p, &EncodingPlan::default(), &PenaltyPolicy::default()).unwrap();
    assert!(h.variable("slack:trivial").is_none());
    assert!(h.penalties.iter().all(|t| t.label != "trivial"));
}

#[test]
fn policy_overrides_modes_and_weights() {
    let p = two_var_problem();
    let policy = PenaltyPolicy::default()
        .with_mode("nonzero", ConstraintMode::Export)
        .with_weight("cap", 7.5);
    let h = compile(&p, &EncodingPlan::default(), &policy).unwrap();
    assert_eq!(h.exported.len(), 1);
    assert_eq!(h.exported[0].label, "nonzero");
    assert_eq!(h.penalties.iter().find(|t| t.label == "cap").unwrap().weight, 7.5);

    let bad = PenaltyPolicy::default().with_weight("cap", -1.0);
    assert!(matches!(
        compile(&p, &EncodingPlan::default(), &bad),
        Err(CompileError::Weight { .. })
    ));
    assert_eq!("export".parse::<ConstraintMode>().unwrap(), ConstraintMode::Export);
    assert!("soft".parse::<ConstraintMode>().is_err());
}

#[test]
fn cores_sit_at_the_hardest_level() {
    let h = compile(
        &two_var_problem(),
        &EncodingPlan::uniform(EncodingSpec::OneHot),
        &PenaltyPolicy::default(),
    )
    .unwrap();
    let cores: Vec<&PenaltyTerm> = h.penalties.iter().filter(|t| t.label.starts_with("core:")).collect();
    assert_eq!(cores.len(), 2);
    assert!(cores.iter().all(|t| t.level == 0));
    assert!(h.penalties.iter().any(|t| t.label == core_label("a")));
}

#[test]
fn compiled_json_round_trip() {
    for (name, spec) in reference_instances() {
        let p = spec.build().unwrap();
        for plan in plans() {
            let h = compile(&p, &plan, &PenaltyPolicy::default().with_mode("core:*", ConstraintMode::Export))
                .unwrap();
            let text = serde_json::to_string(&h.to_json()).unwrap();
            let back = CompiledHamiltonian::from_json(serde_json::from_str(&text).unwrap()).unwrap();
            assert_eq!(back, h, "{name}");
        }
    }
    assert!(CompiledHamiltonian::from_json(serde_json::json!({"num_spins": 2})).is_err());
}

#[test]
fn reweighting_rebuilds_the_total() {
    let h = compile(&two_var_problem(), &EncodingPlan::default(), &PenaltyPolicy::default()).unwrap();
    let doubled: Vec<f64> = h.weights().iter().map(|w| 2.0 * w).collect();
    let r = h.reweighted(&doubled);
    assert_eq!(r.weights(), doubled);
    let mut expected = h.objective.clone();
    for t in &h.penalties {
        expected += t.poly.scale(2.0 * t.weight);
    }
    assert!((&expected - &r.total).terms().all(|(_, c)| c.abs() < 1e-9));
}

fn brute_max_flip(p: &SpinPolynomial, n: usize) -> (f64, Option<f64>) {
    let t = p.energy_table(n).unwrap();
    let mut max = 0.0f64;
    let mut min_pos: Option<f64> = None;
    for z in 0..t.len() {
        for b in 0..n {
            let d = t[z ^ (1 << b)] - t[z];
            max = max.max(d.abs());
            if d > 1e-9 {
                min_pos = Some(min_pos.map_or(d, |m: f64| m.min(d)));
            }
        }
    }
    (max, min_pos)
}

fn poly_strategy(max_spins: usize, max_order: usize) -> impl Strategy<Value = SpinPolynomial> {
    prop::collection::vec(
        (prop::collection::btree_set(0..max_spins, 1..=max_order), -3i32..=3),
        1..7,
    )
    .prop_map(|terms| {
        SpinPolynomial::from_terms(
            terms
                .into_iter()
                .map(|(set, c)| (Monomial::spin_product(set), c as f64)),
        )
    })
}

proptest! {
    #[test]
    fn flip_bounds_agree_with_enumeration(p in poly_strategy(5, 3)) {
        let (max, min_pos) = brute_max_flip(&p, 5);
        prop_assert!(flip_gain_bound(&p) >= max - 1e-9);
        let spins = p.variables();
        if spins.is_empty() {
            prop_assert!(min_flip_cost(&p).is_none());
        } else {
            prop_assert_eq!(min_flip_cost(&p).map(|x| (x * 1e6).round()), min_pos.map(|x| (x * 1e6).round()));
        }
    }

    #[test]
    fn quadratization_preserves_energies(p in poly_strategy(5, 4)) {
        let q = quadratize(&p);
        prop_assert!(q.poly.max_order() <= 2);
        let n = p.max_index().map_or(0, |m| m + 1);
        let total = q.num_spins().max(n);
        prop_assert_eq!(total - n, q.ancillas.len());
        let table = q.poly.energy_table(total).unwrap();
        for z in 0..1usize << n {
            let state: Vec<bool> = (0..n).map(|i| z >> i & 1 == 1).collect();
            let e = p.evaluate(&state).unwrap();
            let best = (0..1usize << (total - n))
                .map(|w| table[z | w << n])
                .fold(f64::INFINITY, f64::min);
            prop_assert!((best - e).abs() < 1e-7, "state {:?}: {} vs {}", state, best, e);
        }
    }
}
