use spinforge::compiler::{compile, CompiledHamiltonian, PenaltyPolicy};
use spinforge::encodings::{EncodingPlan, EncodingSpec};
use spinforge::model::{Constraint, DiscreteVariable, Expr, ProblemInstance};
use spinforge::problems::{reference_instance, reference_instances, Knapsack, ProblemSpec, SetCover};
use spinforge::solve::*;

fn compiled(spec: &ProblemSpec, encoding: EncodingSpec) -> (ProblemInstance, CompiledHamiltonian) {
    let p = spec.build().unwrap();
    let h = compile(&p, &EncodingPlan::uniform(encoding), &PenaltyPolicy::default()).unwrap();
    (p, h)
}

fn bits(z: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| z >> i & 1 == 1).collect()
}

#[test]
fn exhaustive_search_matches_direct_evaluation() {
    for (name, spec) in reference_instances() {
        let (_, h) = compiled(&spec, EncodingSpec::Binary);
        let n = h.num_spins;
        let energies: Vec<f64> = (0..1u64 << n).map(|z| h.total.evaluate(&bits(z, n)).unwrap()).collect();
        let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let count = energies.iter().filter(|&&e| e <= min + 1e-9).count() as u64;

        let r = solve_exhaustive(&h, &ExhaustiveOptions::default()).unwrap();
        assert!((r.ground_energy - min).abs() < 1e-9, "{name}");
        assert_eq!(r.degeneracy, count, "{name}");
        assert_eq!(r.states_searched, 1 << n);
        assert_eq!(r.solutions.len() as u64, count);
        for s in &r.solutions {
            assert_eq!(s.energy, h.total.evaluate(&s.state).unwrap(), "{name}");
            assert_eq!(s.assignment, h.decode(&s.state));
            assert_eq!(s.degeneracy, count);
        }
        let strings: Vec<String> = r.solutions.iter().map(Solution::state_string).collect();
        let mut sorted = strings.clone();
        sorted.sort();
        assert_eq!(strings, sorted, "{name}: solutions are not in a stable order");
    }
}

#[test]
fn max_solutions_truncates_but_keeps_the_count() {
    let (_, h) = compiled(&reference_instance("graph_coloring").unwrap(), EncodingSpec::OneHot);
    let full = solve_exhaustive(&h, &ExhaustiveOptions::default()).unwrap();
    assert!(full.degeneracy > 1);
    let opts = ExhaustiveOptions {
        max_solutions: 1,
        ..Default::default()
    };
    let r = solve_exhaustive(&h, &opts).unwrap();
    assert_eq!(r.solutions.len(), 1);
    assert_eq!(r.degeneracy, full.degeneracy);
    assert_eq!(r.solutions[0], full.solutions[0]);
}

#[test]
fn annealing_never_beats_the_exact_minimum() {
    for (name, spec) in reference_instances() {
        let (p, h) = compiled(&spec, EncodingSpec::Binary);
        let exact = solve_exhaustive(&h, &ExhaustiveOptions::default()).unwrap();
        let opts = SaOptions::for_hamiltonian(&h, 7);
        let sa = solve_sa(&h, &opts).unwrap();
        assert_eq!(sa.state.len(), h.num_spins);
        assert_eq!(sa.energy, h.total.evaluate(&sa.state).unwrap());
        assert!(sa.energy >= exact.ground_energy - 1e-9, "{name}");
        // The schedule is seeded, so a second run reproduces the state.
        assert_eq!(solve_sa(&h, &opts).unwrap(), sa, "{name}");
        if (sa.energy - exact.ground_energy).abs() < 1e-9 {
            let oracle = spec.oracle().unwrap();
            assert!(verify(&p, &h, &[sa], &oracle).passed, "{name}");
        }
    }
}

#[test]
fn annealing_rejects_empty_schedules() {
    let (_, h) = compiled(&reference_instance("mis").unwrap(), EncodingSpec::Binary);
    let mut opts = SaOptions::for_hamiltonian(&h, 1);
    opts.restarts = 0;
    assert!(matches!(solve_sa(&h, &opts), Err(SolveError::InvalidSchedule(_))));
    let mut opts = SaOptions::for_hamiltonian(&h, 1);
    opts.sweeps = 0;
    assert!(matches!(solve_sa(&h, &opts), Err(SolveError::InvalidSchedule(_))));
}

#[test]
fn reference_instances_verify_under_exhaustive_search() {
    for (name, spec) in reference_instances() {
        let (p, h) = compiled(&spec, EncodingSpec::Binary);
        let r = solve_exhaustive(&h, &ExhaustiveOptions::default()).unwrap();
        let report = verify(&p, &h, &r.solutions, &spec.oracle().unwrap());
        assert!(report.passed, "{name}: {:?}", report.failures);
        assert_eq!(report.checks.len(), r.solutions.len());
    }
}

#[test]
fn underweighted_capacity_is_named_in_the_failures() {
    let spec = ProblemSpec::Knapsack(Knapsack {
        values: vec![6.0, 10.0, 12.0],
        weights: vec![1, 2, 3],
        capacity: 5,
    });
    let (p, h) = compiled(&spec, EncodingSpec::Binary);
    let weak: Vec<f64> = h.weights().iter().map(|w| w * 1e-3).collect();
    let h = h.reweighted(&weak);
    let r = solve_exhaustive(&h, &ExhaustiveOptions::default()).unwrap();
    let report = verify(&p, &h, &r.solutions, &spec.oracle().unwrap());
    assert!(!report.passed);
    assert!(report.oracle_feasible);
    assert!(
        report.failures.iter().any(|f| f.contains("`capacity`")),
        "{:?}",
        report.failures
    );
    let residual = report.checks[0].residuals["capacity"];
    assert!(residual > 0.0);
}

#[test]
fn tampered_energy_is_reported() {
    let spec = reference_instance("mis").unwrap();
    let (p, h) = compiled(&spec, EncodingSpec::Binary);
    let mut r = solve_exhaustive(&h, &ExhaustiveOptions::default()).unwrap();
    r.solutions[0].energy -= 1.0;
    let report = verify(&p, &h, &r.solutions, &spec.oracle().unwrap());
    assert!(report.failures.iter().any(|f| f.contains("recorded energy")));
    assert!(!verify(&p, &h, &[], &spec.oracle().unwrap()).passed);
}

#[test]
fn infeasible_instances_are_reported_as_such() {
    let spec = ProblemSpec::SetCover(SetCover {
        universe: vec![1, 2, 3],
        subsets: vec![vec![1, 2], vec![2, 3]],
        exact: true,
    });
    let oracle = spec.oracle().unwrap();
    assert!(!oracle.feasible);
    assert!(oracle.optimum.is_none());
    for encoding in [EncodingSpec::Binary, EncodingSpec::OneHot] {
        let (p, h) = compiled(&spec, encoding);
        let r = solve_exhaustive(&h, &ExhaustiveOptions::default()).unwrap();
        assert!(r.solutions.iter().all(|s| !s.feasible));
        let report = verify(&p, &h, &r.solutions, &oracle);
        assert!(!report.oracle_feasible && !report.hamiltonian_feasible);
        assert!(report.passed, "{:?}", report.failures);
    }
}

#[test]
fn exported_subspace_search() {
    let spec = reference_instance("graph_coloring").unwrap();
    let p = spec.build().unwrap();
    let h = compile(&p, &EncodingPlan::uniform(EncodingSpec::OneHot), &PenaltyPolicy::export_all()).unwrap();
    let opts = ExhaustiveOptions {
        restrict_to_exported: true,
        ..Default::default()
    };
    let r = solve_exhaustive(&h, &opts).unwrap();
    // Proper 3-colorings of a triangle: 3! of them.
    assert_eq!(r.states_searched, 6);
    assert_eq!(r.degeneracy, 6);
    assert!(verify(&p, &h, &r.solutions, &spec.oracle().unwrap()).passed);

    let mut q = ProblemInstance::new("contradiction", "");
    q.add_variable(DiscreteVariable::new("x", 0, 1).unwrap());
    q.add_constraint(Constraint::eq(Expr::value("x"), 2.0, "impossible"));
    let h = compile(&q, &EncodingPlan::default(), &PenaltyPolicy::export_all()).unwrap();
    assert_eq!(solve_exhaustive(&h, &opts), Err(SolveError::EmptySubspace));
}

#[test]
fn spin_cap_is_enforced() {
    let (_, h) = compiled(&reference_instance("clustering").unwrap(), EncodingSpec::OneHot);
    let opts = ExhaustiveOptions {
        max_spins: h.num_spins - 1,
        ..Default::default()
    };
    assert_eq!(
        solve_exhaustive(&h, &opts),
        Err(SolveError::TooManySpins {
            spins: h.num_spins,
            cap: h.num_spins - 1
        })
    );
}

#[test]
fn solutions_serialize_with_bit_strings() {
    let (_, h) = compiled(&reference_instance("mis").unwrap(), EncodingSpec::Binary);
    let r = solve_exhaustive(&h, &ExhaustiveOptions::default()).unwrap();
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["solutions"][0]["state"], r.solutions[0].state_string());
    let back: ExhaustiveResult = serde_json::from_value(json).unwrap();
    assert_eq!(back, r);
}
