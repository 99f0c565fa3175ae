//! Small reference instances, one or more per generator, sized so every
//! compiled Hamiltonian stays within exhaustive reach.

use super::*;

fn g(n: usize, edges: &[[usize; 2]]) -> GraphInput {
    GraphInput::new(n, edges.iter().map(|e| e.to_vec()).collect())
}

/// Named instances in a fixed order.
pub fn reference_instances() -> Vec<(&'static str, ProblemSpec)> {
    let square = vec![
        vec![0.0, 1.0, 4.0, 3.0],
        vec![1.0, 0.0, 2.0, 5.0],
        vec![4.0, 2.0, 0.0, 1.0],
        vec![3.0, 5.0, 1.0, 0.0],
    ];
    vec![
        (
            "clustering",
            ProblemSpec::Clustering(Clustering {
                distances: square,
                weights: vec![1, 1, 1, 1],
                k: 2,
                w_max: 2,
            }),
        ),
        (
            "number_partitioning",
            ProblemSpec::NumberPartitioning(NumberPartitioning {
                numbers: vec![1.0, 2.0, 3.0],
                k: 2,
            }),
        ),
        (
            "graph_coloring",
            ProblemSpec::GraphColoring(GraphColoring {
                graph: GraphInput::complete(3),
                k: 3,
                minimize_colors: false,
            }),
        ),
        (
            "graph_partitioning",
            ProblemSpec::GraphPartitioning(GraphPartitioning {
                graph: GraphInput::cycle(4),
                k: 2,
                sizes: PartitionSizes::Equal,
            }),
        ),
        (
            "hypergraph_partitioning",
            ProblemSpec::GraphPartitioning(GraphPartitioning {
                graph: GraphInput::new(4, vec![vec![0, 1, 2], vec![2, 3]]),
                k: 2,
                sizes: PartitionSizes::Exact(vec![3, 1]),
            }),
        ),
        (
            "clique_cover",
            ProblemSpec::CliqueCover(CliqueCover {
                graph: g(4, &[[0, 1], [2, 3]]),
                k: 2,
                minimize: false,
            }),
        ),
        (
            "cliques",
            ProblemSpec::Cliques(Cliques {
                graph: g(4, &[[0, 1], [0, 2], [1, 2], [2, 3]]),
                size: CliqueSize::Fixed(3),
            }),
        ),
        (
            "mis",
            ProblemSpec::Mis(Mis {
                graph: GraphInput::path(3),
            }),
        ),
        (
            "set_packing",
            ProblemSpec::SetPacking(SetPacking {
                subsets: vec![vec![1, 2], vec![2, 3], vec![3], vec![4]],
            }),
        ),
        (
            "vertex_cover",
            ProblemSpec::VertexCover(VertexCover {
                graph: GraphInput::complete(3),
            }),
        ),
        (
            "min_maximal_matching",
            ProblemSpec::MinMaximalMatching(MinMaximalMatching {
                graph: GraphInput::path(4),
            }),
        ),
        (
            "set_cover",
            ProblemSpec::SetCover(SetCover {
                universe: vec![1, 2, 3],
                subsets: vec![vec![1, 2], vec![2, 3], vec![3]],
                exact: false,
            }),
        ),
        (
            "exact_cover",
            ProblemSpec::SetCover(SetCover {
                universe: vec![1, 2, 3],
                subsets: vec![vec![1, 2], vec![3], vec![2, 3]],
                exact: true,
            }),
        ),
        (
            "knapsack",
            ProblemSpec::Knapsack(Knapsack {
                values: vec![6.0, 10.0, 12.0],
                weights: vec![1, 2, 3],
                capacity: 5,
            }),
        ),
        (
            "hamiltonian_cycle",
            ProblemSpec::HamiltonianCycle(HamiltonianCycle {
                graph: GraphInput::cycle(4),
            }),
        ),
        (
            "tsp",
            ProblemSpec::Tsp(Tsp::symmetric(3, |i, j| [[0.0, 2.0, 3.0], [0.0, 0.0, 4.0]][i][j])),
        ),
        (
            "machine_scheduling",
            ProblemSpec::MachineScheduling(MachineScheduling {
                machines: 2,
                slots: 2,
                jobs: 3,
                precedence: vec![],
                consecutive: vec![],
                objective: ScheduleObjective::Earliest,
            }),
        ),
        (
            "machine_scheduling_makespan",
            ProblemSpec::MachineScheduling(MachineScheduling {
                machines: 2,
                slots: 2,
                jobs: 3,
                precedence: vec![],
                consecutive: vec![],
                objective: ScheduleObjective::Makespan,
            }),
        ),
        (
            "nurse_scheduling",
            ProblemSpec::NurseScheduling(NurseScheduling {
                nurses: 2,
                shifts: 2,
                powers: vec![1, 1],
                min_workload: vec![1, 1],
                d_max: Some(1),
                mode: NurseMode::Combined,
                balance: false,
            }),
        ),
        (
            "ksat",
            ProblemSpec::Ksat(Ksat {
                num_vars: 2,
                clauses: vec![vec![1, 2], vec![-1, 2]],
                mode: KsatMode::Clause,
            }),
        ),
        (
            "ksat_mis",
            ProblemSpec::Ksat(Ksat {
                num_vars: 2,
                clauses: vec![vec![1, 2], vec![-1, 2]],
                mode: KsatMode::Mis,
            }),
        ),
        (
            "syndrome_check",
            ProblemSpec::SyndromeDecoding(SyndromeDecoding::new(
                vec![vec![1, 1, 0], vec![0, 1, 1]],
                vec![1, 0],
                SyndromeForm::Check,
            )),
        ),
        (
            "syndrome_generator",
            ProblemSpec::SyndromeDecoding(SyndromeDecoding::new(
                vec![vec![1, 1, 0], vec![0, 1, 1]],
                vec![1, 0],
                SyndromeForm::Generator,
            )),
        ),
        (
            "mod2_linprog",
            ProblemSpec::Mod2Linprog(Mod2LinProg {
                a: vec![vec![1, 0, 1], vec![0, 1, 1]],
                y: vec![1, 0, 0],
            }),
        ),
    ]
}

pub fn reference_instance(name: &str) -> Option<ProblemSpec> {
    reference_instances().into_iter().find(|(n, _)| *n == name).map(|(_, s)| s)
}
