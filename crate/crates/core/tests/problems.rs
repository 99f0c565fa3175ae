use proptest::prelude::*;

use spinforge::compiler::{compile, CompiledHamiltonian, PenaltyPolicy};
use spinforge::encodings::{EncodingPlan, EncodingSpec};
use spinforge::model::{assignments, Assignment, ProblemInstance};
use spinforge::problems::*;
use spinforge::solve::{solve_exhaustive, verify, ExhaustiveOptions, ExhaustiveResult};

struct Run {
    p: ProblemInstance,
    h: CompiledHamiltonian,
    r: ExhaustiveResult,
    oracle: OracleResult,
}

fn run_with(spec: &ProblemSpec, enc: EncodingSpec) -> Run {
    let p = spec.build().unwrap();
    let h = compile(&p, &EncodingPlan::uniform(enc), &PenaltyPolicy::default()).unwrap();
    let r = solve_exhaustive(&h, &ExhaustiveOptions::default()).unwrap();
    let oracle = spec.oracle().unwrap();
    Run { p, h, r, oracle }
}

fn run(spec: &ProblemSpec) -> Run {
    run_with(spec, EncodingSpec::Binary)
}

/// Solves with a dense and a sparse encoding, checks the oracle agrees, and
/// returns the oracle.
fn agreed(spec: ProblemSpec) -> OracleResult {
    let mut oracle = None;
    for enc in [EncodingSpec::Binary, EncodingSpec::OneHot] {
        let x = run_with(&spec, enc.clone());
        let report = verify(&x.p, &x.h, &x.r.solutions, &x.oracle);
        assert!(report.passed, "{}/{enc}: {:?}", spec.name(), report.failures);
        oracle = Some(x.oracle);
    }
    oracle.unwrap()
}

fn distance_matrix() -> Vec<Vec<f64>> {
    vec![
        vec![0.0, 3.0, 1.0, 7.0],
        vec![3.0, 0.0, 6.0, 2.0],
        vec![1.0, 6.0, 0.0, 5.0],
        vec![7.0, 2.0, 5.0, 0.0],
    ]
}

#[test]
fn clustering_matches_split_enumeration() {
    let d = distance_matrix();
    let mut best = f64::INFINITY;
    for mask in 0u32..16 {
        let mut cost = 0.0;
        for i in 0..4 {
            for j in i + 1..4 {
                if (mask >> i & 1) == (mask >> j & 1) {
                    cost += d[i][j];
                }
            }
        }
        best = best.min(cost);
    }
    let o = agreed(ProblemSpec::Clustering(Clustering {
        distances: d,
        weights: vec![1; 4],
        k: 2,
        w_max: 10,
    }));
    assert_eq!(o.optimum, Some(best));
}

#[test]
fn clustering_weight_limit_separates_heavy_points() {
    let o = agreed(ProblemSpec::Clustering(Clustering {
        distances: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        weights: vec![2, 2],
        k: 2,
        w_max: 3,
    }));
    assert!(o.witnesses.iter().all(|a| a["v_0"] != a["v_1"]));
    assert_eq!(o.optimum, Some(0.0));
}

#[test]
fn single_cluster_collects_all_distances() {
    let d = distance_matrix();
    let total: f64 = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).map(|(i, j)| d[i][j]).sum();
    let o = agreed(ProblemSpec::Clustering(Clustering {
        distances: d,
        weights: vec![1; 4],
        k: 1,
        w_max: 4,
    }));
    assert_eq!(o.optimum, Some(total));
}

#[test]
fn number_partitioning_examples() {
    let np = |numbers: Vec<f64>, k| ProblemSpec::NumberPartitioning(NumberPartitioning { numbers, k });
    // Sign vectors over {1, 2, 3}: the best split is {3} | {1, 2}.
    let best = (0u32..8)
        .map(|m| (0..3).map(|i| if m >> i & 1 == 1 { (i + 1) as f64 } else { -((i + 1) as f64) }).sum::<f64>().powi(2))
        .fold(f64::INFINITY, f64::min);
    assert_eq!(agreed(np(vec![1.0, 2.0, 3.0], 2)).optimum, Some(best));
    assert_eq!(best, 0.0);
    assert_eq!(agreed(np(vec![5.0], 2)).optimum, Some(25.0));
    assert_eq!(agreed(np(vec![1.0, 1.0, 1.0], 3)).optimum, Some(0.0));
}

#[test]
fn triangle_coloring() {
    let tri = |k| {
        ProblemSpec::GraphColoring(GraphColoring {
            graph: GraphInput::complete(3),
            k,
            minimize_colors: false,
        })
    };
    let x = run(&tri(3));
    assert!(x.r.ground_energy.abs() < 1e-9);
    assert_eq!(x.oracle.witnesses.len(), 6);

    // Two colors: the fewest clashing edges over all 8 labelings is one.
    let p = tri(2).build().unwrap();
    let vars: Vec<_> = p.variables.iter().collect();
    let min = assignments(&vars)
        .map(|a| p.constraints[0].lhs.eval(&a).unwrap())
        .fold(f64::INFINITY, f64::min);
    assert_eq!(min, 1.0);
    assert!(!tri(2).oracle().unwrap().feasible);

    let single = ProblemSpec::GraphColoring(GraphColoring {
        graph: GraphInput::new(1, vec![]),
        k: 2,
        minimize_colors: true,
    });
    assert_eq!(agreed(single).optimum, Some(1.0));
}

#[test]
fn graph_partitioning_examples() {
    let o = agreed(ProblemSpec::GraphPartitioning(GraphPartitioning {
        graph: GraphInput::cycle(4),
        k: 2,
        sizes: PartitionSizes::Equal,
    }));
    assert_eq!(o.optimum, Some(2.0));

    let o = agreed(ProblemSpec::GraphPartitioning(GraphPartitioning {
        graph: GraphInput::complete(3),
        k: 3,
        sizes: PartitionSizes::Exact(vec![1, 1, 1]),
    }));
    assert_eq!(o.optimum, Some(3.0));

    let hyper = GraphPartitioning {
        graph: GraphInput::new(3, vec![vec![0, 1, 2]]),
        k: 2,
        sizes: PartitionSizes::Free,
    };
    let p = hyper.build().unwrap();
    let vars: Vec<_> = p.variables.iter().collect();
    for a in assignments(&vars) {
        let together = a["v_0"] == a["v_1"] && a["v_1"] == a["v_2"];
        assert_eq!(p.eval_objective(&a).unwrap(), if together { 0.0 } else { 1.0 });
    }
}

#[test]
fn clique_examples() {
    let two_edges = GraphInput::new(4, vec![vec![0, 1], vec![2, 3]]);
    let x = run(&ProblemSpec::CliqueCover(CliqueCover {
        graph: two_edges,
        k: 2,
        minimize: false,
    }));
    assert!(x.r.ground_energy.abs() < 1e-9);

    let tri = ProblemSpec::Cliques(Cliques {
        graph: GraphInput::complete(3),
        size: CliqueSize::Fixed(3),
    });
    assert!(agreed(tri).feasible);

    let p3 = ProblemSpec::Cliques(Cliques {
        graph: GraphInput::path(3),
        size: CliqueSize::Fixed(3),
    });
    let x = run(&p3);
    assert!(!x.oracle.feasible);
    assert!(x.r.ground_energy > 1e-9);
    let report = verify(&x.p, &x.h, &x.r.solutions, &x.oracle);
    assert!(report.passed && !report.oracle_feasible && !report.hamiltonian_feasible);

    let largest = ProblemSpec::Cliques(Cliques {
        graph: GraphInput::new(4, vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![2, 3]]),
        size: CliqueSize::Maximize,
    });
    assert_eq!(agreed(largest).optimum, Some(-3.0));
}

#[test]
fn subset_examples() {
    let o = agreed(ProblemSpec::Mis(Mis {
        graph: GraphInput::path(3),
    }));
    assert_eq!(o.optimum, Some(-2.0));
    assert_eq!(o.witnesses, vec![[("x_0", 1), ("x_1", 0), ("x_2", 1)].map(|(k, v)| (k.to_string(), v)).into()]);

    let o = agreed(ProblemSpec::VertexCover(VertexCover {
        graph: GraphInput::complete(3),
    }));
    assert_eq!(o.optimum, Some(2.0));

    let o = agreed(ProblemSpec::MinMaximalMatching(MinMaximalMatching {
        graph: GraphInput::path(4),
    }));
    assert_eq!(o.optimum, Some(1.0));
    assert_eq!(o.witnesses.len(), 1);
    assert_eq!(o.witnesses[0]["x_1"], 1);

    let o = agreed(ProblemSpec::SetPacking(SetPacking {
        subsets: vec![vec![1, 2], vec![2, 3], vec![3, 4]],
    }));
    assert_eq!(o.optimum, Some(-2.0));
}

#[test]
fn cover_and_knapsack_examples() {
    let o = agreed(ProblemSpec::SetCover(SetCover {
        universe: vec![1, 2, 3],
        subsets: vec![vec![1, 2], vec![2, 3], vec![3]],
        exact: false,
    }));
    assert_eq!(o.optimum, Some(2.0));

    let o = agreed(ProblemSpec::SetCover(SetCover {
        universe: vec![1, 2, 3],
        subsets: vec![vec![1, 2], vec![3]],
        exact: true,
    }));
    assert_eq!(o.optimum, Some(2.0));
    assert_eq!(o.witnesses.len(), 1);

    let o = agreed(ProblemSpec::Knapsack(Knapsack {
        values: vec![6.0, 10.0, 12.0],
        weights: vec![1, 2, 3],
        capacity: 5,
    }));
    assert_eq!(o.optimum, Some(-22.0));
}

#[test]
fn uncoverable_element_is_infeasible() {
    let spec = ProblemSpec::SetCover(SetCover {
        universe: vec![1, 9],
        subsets: vec![vec![1]],
        exact: false,
    });
    let x = run(&spec);
    assert!(!x.oracle.feasible);
    assert!(verify(&x.p, &x.h, &x.r.solutions, &x.oracle).passed);
}

#[test]
fn tour_examples() {
    let x = run(&ProblemSpec::HamiltonianCycle(HamiltonianCycle {
        graph: GraphInput::cycle(4),
    }));
    assert!(x.r.ground_energy.abs() < 1e-9);
    assert_eq!(x.oracle.witnesses.len(), 8);

    let x = run(&ProblemSpec::HamiltonianCycle(HamiltonianCycle {
        graph: GraphInput::star(3),
    }));
    assert!(!x.oracle.feasible);
    assert!(x.r.ground_energy > 1e-9);

    let (d01, d02, d12) = (2.0, 5.0, 7.0);
    let tsp = Tsp::symmetric(3, |i, j| match (i, j) {
        (0, 1) => d01,
        (0, 2) => d02,
        _ => d12,
    });
    assert_eq!(tsp.build().unwrap().constraints.len(), 1, "complete graphs need no link constraint");
    assert_eq!(agreed(ProblemSpec::Tsp(tsp)).optimum, Some(d01 + d02 + d12));
}

#[test]
fn tsp_with_missing_road() {
    let mut tsp = Tsp::symmetric(4, |i, j| (i + 2 * j) as f64);
    tsp.costs[0][2] = None;
    tsp.costs[2][0] = None;
    let o = agreed(ProblemSpec::Tsp(tsp));
    // Without the 0–2 road the only tour is 0-1-2-3-0 (either direction): 2+5+8+6.
    assert_eq!(o.optimum, Some(21.0));
}

fn schedule(objective: ScheduleObjective) -> ProblemSpec {
    ProblemSpec::MachineScheduling(MachineScheduling {
        machines: 2,
        slots: 2,
        jobs: 3,
        precedence: vec![],
        consecutive: vec![],
        objective,
    })
}

#[test]
fn machine_scheduling_examples() {
    let o = agreed(schedule(ScheduleObjective::Earliest));
    assert_eq!(o.optimum, Some(4.0));
    for a in &o.witnesses {
        let first = (1..=2).filter(|m| a[&format!("v_{m}_1")] != 0).count();
        let second = (1..=2).filter(|m| a[&format!("v_{m}_2")] != 0).count();
        assert_eq!((first, second), (2, 1));
    }
    assert_eq!(agreed(schedule(ScheduleObjective::Makespan)).optimum, Some(2.0));

    let one = ProblemSpec::MachineScheduling(MachineScheduling {
        machines: 1,
        slots: 1,
        jobs: 1,
        precedence: vec![],
        consecutive: vec![],
        objective: ScheduleObjective::Makespan,
    });
    assert_eq!(agreed(one).optimum, Some(1.0));
}

#[test]
fn machine_scheduling_orderings() {
    let spec = ProblemSpec::MachineScheduling(MachineScheduling {
        machines: 1,
        slots: 3,
        jobs: 2,
        precedence: vec![(2, 1)],
        consecutive: vec![(2, 1)],
        objective: ScheduleObjective::Earliest,
    });
    let o = agreed(spec);
    assert_eq!(o.optimum, Some(3.0));
    assert_eq!(o.witnesses.len(), 1);
    assert_eq!((o.witnesses[0]["v_1_1"], o.witnesses[0]["v_1_2"]), (2, 1));
}

fn roster(shifts: usize, min: Vec<i64>, d_max: Option<usize>, mode: NurseMode, nurses: usize) -> ProblemSpec {
    ProblemSpec::NurseScheduling(NurseScheduling {
        nurses,
        shifts,
        powers: vec![1; nurses],
        min_workload: min,
        d_max,
        mode,
        balance: false,
    })
}

#[test]
fn nurse_scheduling_examples() {
    let o = agreed(roster(2, vec![1, 1], None, NurseMode::Combined, 2));
    assert_eq!(o.optimum, Some(0.0));
    for a in &o.witnesses {
        assert_eq!(a["v_0_0"] + a["v_1_0"], 1);
        assert_eq!(a["v_0_1"] + a["v_1_1"], 1);
    }

    let spec = roster(3, vec![1, 1, 1], Some(1), NurseMode::Combined, 1);
    let x = run(&spec);
    let all: Assignment = (0..3).map(|t| (format!("v_0_{t}"), 1)).collect();
    assert!(!x.p.is_feasible(&all).unwrap());
    let o = agreed(spec);
    assert_eq!(o.optimum, Some(1.0));
    assert!(o.witnesses.iter().all(|a| a["v_0_0"] + a["v_0_1"] < 2 && a["v_0_1"] + a["v_0_2"] < 2));

    let o = agreed(roster(2, vec![0, 0], None, NurseMode::Combined, 2));
    assert_eq!(o.witnesses.len(), 1);
    assert!(o.witnesses[0].values().all(|&v| v == 0));

    let o = agreed(roster(2, vec![1, 2], None, NurseMode::ShiftCount, 2));
    assert_eq!(o.optimum, Some(3.0));
}

#[test]
fn ksat_examples() {
    let sat = Ksat {
        num_vars: 2,
        clauses: vec![vec![1, 2], vec![-1, 2]],
        mode: KsatMode::Clause,
    };
    let o = agreed(ProblemSpec::Ksat(sat));
    assert_eq!(o.optimum, Some(0.0));
    assert!(o.witnesses.iter().all(|a| a["x_2"] == 1));

    let contradiction = Ksat {
        num_vars: 1,
        clauses: vec![vec![1], vec![-1]],
        mode: KsatMode::Clause,
    };
    assert_eq!(agreed(ProblemSpec::Ksat(contradiction.clone())).optimum, Some(1.0));

    let mis = Ksat {
        mode: KsatMode::Mis,
        ..contradiction
    };
    let o = agreed(ProblemSpec::Ksat(mis.clone()));
    assert!(!mis.satisfiable_from_mis(o.optimum.unwrap()));
}

fn repetition() -> Vec<Vec<u8>> {
    vec![vec![1, 1, 0], vec![0, 1, 1]]
}

#[test]
fn syndrome_examples() {
    for (error, weight) in [(vec![1, 0, 0], 1.0), (vec![0, 0, 0], 0.0)] {
        let eta = SyndromeDecoding::syndrome_of(&repetition(), &error);
        let by_check = agreed(ProblemSpec::SyndromeDecoding(SyndromeDecoding::new(
            repetition(),
            eta.clone(),
            SyndromeForm::Check,
        )));
        let gen = SyndromeDecoding::new(repetition(), eta, SyndromeForm::Generator);
        let by_gen = agreed(ProblemSpec::SyndromeDecoding(gen.clone()));
        assert_eq!(by_check.optimum, Some(weight));
        assert_eq!(by_gen.optimum, Some(weight));
        let e: Vec<u8> = (0..3).map(|j| by_check.witnesses[0][&format!("e_{j}")] as u8).collect();
        let u: Vec<u8> = vec![by_gen.witnesses[0]["u_0"] as u8];
        assert_eq!(e, error);
        assert_eq!(gen.error_from_logical(&u).unwrap(), error);
    }
}

#[test]
fn hamming_recovers_random_single_error() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let pos = rng.gen_range(0..7);
    let mut e = vec![0u8; 7];
    e[pos] = 1;
    let check = hamming_7_4();
    let eta = SyndromeDecoding::syndrome_of(&check, &e);
    let o = agreed(ProblemSpec::SyndromeDecoding(SyndromeDecoding::new(check, eta, SyndromeForm::Check)));
    assert_eq!(o.witnesses.len(), 1);
    assert_eq!(o.witnesses[0][&format!("e_{pos}")], 1);
}

#[test]
fn gf2_helpers_describe_the_code() {
    let check = hamming_7_4();
    let g = generator_from_check(&check).unwrap();
    assert_eq!(g.len(), 4);
    for row in &g {
        assert_eq!(SyndromeDecoding::syndrome_of(&check, row), vec![0, 0, 0]);
    }
    let v = particular_solution(&check, &[1, 0, 1]).unwrap().unwrap();
    assert_eq!(SyndromeDecoding::syndrome_of(&check, &v), vec![1, 0, 1]);
}

#[test]
fn mod2_examples() {
    let o = agreed(ProblemSpec::Mod2Linprog(Mod2LinProg {
        a: vec![vec![1, 0], vec![0, 1]],
        y: vec![1, 0],
    }));
    assert_eq!(o.optimum, Some(-2.0));
    assert_eq!(o.witnesses.len(), 1);
    assert_eq!((o.witnesses[0]["x_0"], o.witnesses[0]["x_1"]), (1, 0));

    // One row, three columns: the closest of {000, 111} to 101 is at distance 1.
    let o = agreed(ProblemSpec::Mod2Linprog(Mod2LinProg {
        a: vec![vec![1, 1, 1]],
        y: vec![1, 0, 1],
    }));
    assert_eq!(o.optimum, Some(2.0 * 1.0 - 3.0));

    let o = agreed(ProblemSpec::Mod2Linprog(Mod2LinProg {
        a: vec![vec![1, 1, 0], vec![0, 1, 1]],
        y: vec![0, 0, 0],
    }));
    assert_eq!(o.witnesses.len(), 1);
    assert!(o.witnesses[0].values().all(|&v| v == 0));
}

#[test]
fn malformed_inputs_are_rejected() {
    let bad_graph = GraphColoring {
        graph: GraphInput::new(2, vec![vec![0, 5]]),
        k: 2,
        minimize_colors: false,
    };
    assert!(matches!(bad_graph.build(), Err(ProblemError::Invalid(_))));
    let dup = Mis {
        graph: GraphInput::new(2, vec![vec![0, 1], vec![1, 0]]),
    };
    assert!(dup.build().is_err());
    let knap = Knapsack {
        values: vec![1.0],
        weights: vec![1, 2],
        capacity: 2,
    };
    assert!(knap.build().is_err());
    let sat = Ksat {
        num_vars: 1,
        clauses: vec![vec![2]],
        mode: KsatMode::Clause,
    };
    assert!(sat.oracle().is_err());
}

#[test]
fn feasibility_fidelity_on_reference_instances() {
    for (name, spec) in reference_instances() {
        let x = run(&spec);
        let table = x.h.total.energy_table(x.h.num_spins).unwrap();
        let mut best_feasible = f64::INFINITY;
        let mut best_infeasible = f64::INFINITY;
        for (z, &e) in table.iter().enumerate() {
            let state: Vec<bool> = (0..x.h.num_spins).map(|i| z >> i & 1 == 1).collect();
            let ok = x.h.decode_complete(&state).is_some_and(|a| x.p.is_feasible(&a).unwrap());
            if ok {
                best_feasible = best_feasible.min(e);
            } else {
                best_infeasible = best_infeasible.min(e);
            }
        }
        assert!(best_infeasible > best_feasible + 1e-9, "{name}: {best_infeasible} vs {best_feasible}");
    }
}

#[test]
fn spec_json_round_trip() {
    for (name, spec) in reference_instances() {
        let text = serde_json::to_string(&spec).unwrap();
        let back: ProblemSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec, "{name}");
        assert_eq!(back.build().unwrap(), spec.build().unwrap());
    }
    let v: ProblemSpec = serde_json::from_value(serde_json::json!({
        "problem": "knapsack",
        "data": {"values": [1.0], "weights": [1], "capacity": 1}
    }))
    .unwrap();
    assert_eq!(v.name(), "knapsack");
}

fn clause() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec((1i64..=4, any::<bool>()), 1..=3)
        .prop_map(|ls| ls.into_iter().map(|(v, neg)| if neg { -v } else { v }).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn clause_mode_ground_energy_counts_unsatisfiable_clauses(clauses in prop::collection::vec(clause(), 1..=5)) {
        let m = clauses.len();
        let max_sat = (0u32..16)
            .map(|z| {
                clauses
                    .iter()
                    .filter(|c| c.iter().any(|&l| (z >> (l.unsigned_abs() - 1) & 1 == 1) == (l > 0)))
                    .count()
            })
            .max()
            .unwrap();
        let spec = ProblemSpec::Ksat(Ksat { num_vars: 4, clauses, mode: KsatMode::Clause });
        let x = run(&spec);
        prop_assert!((x.r.ground_energy - (m - max_sat) as f64).abs() < 1e-9);
    }
}

#[test]
fn model_level_oracle_agrees_with_native_oracles() {
    for (name, spec) in reference_instances() {
        let native = spec.oracle().unwrap();
        let generic = instance_oracle(&spec.build().unwrap()).unwrap();
        assert_eq!(generic.feasible, native.feasible, "{name}");
        match (generic.optimum, native.optimum) {
            (Some(a), Some(b)) => assert!((a - b).abs() < 1e-9, "{name}: {a} vs {b}"),
            (a, b) => assert_eq!(a, b, "{name}"),
        }
        assert_eq!(generic.witnesses, native.witnesses, "{name}");
    }
}
