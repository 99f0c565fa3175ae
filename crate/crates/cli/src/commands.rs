use std::fmt::Write as _;
use std::fs;

use serde_json::{json, Value};
use spinforge::compiler::{self, quadratize, CompiledHamiltonian};
use spinforge::encodings::{EncodingPlan, EncodingSpec};
use spinforge::model::ProblemInstance;
use spinforge::parity::{parity_transform, verify_parity_equivalence};
use spinforge::problems::{instance_oracle, ProblemSpec};
use spinforge::solve::{solve_exhaustive, solve_sa, verify as check, ExhaustiveOptions, SaOptions, Solution};

use crate::failure::Failure;
use crate::input::{self, Source};
use crate::report::{self, num, Table};
use crate::{CommonArgs, Method, SolveArgs};

/// Rows of the solution table before it is cut short.
const SHOWN_SOLUTIONS: usize = 16;

/// Writes the artifact to `--out` and the report to stdout, or the artifact
/// to stdout and the report to stderr.
fn emit(args: &CommonArgs, artifact: &Value, report: &str) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(artifact).expect("JSON values serialize");
    match &args.out {
        Some(path) => {
            fs::write(path, format!("{text}\n"))
                .map_err(|e| Failure::Output(format!("cannot write {}: {e}", path.display())))?;
            print!("{report}");
        }
        None => {
            println!("{text}");
            eprint!("{report}");
        }
    }
    Ok(())
}

fn describe(p: &ProblemInstance) -> String {
    let name = if p.metadata.name.is_empty() {
        "model"
    } else {
        p.metadata.name.as_str()
    };
    format!(
        "{name}: {}, {}",
        plural(p.variables.len(), "variable"),
        plural(p.constraints.len(), "constraint")
    )
}

fn plural(n: usize, noun: &str) -> String {
    if n == 1 {
        format!("1 {noun}")
    } else {
        format!("{n} {noun}s")
    }
}

struct Prepared {
    h: CompiledHamiltonian,
    problem: Option<(Option<ProblemSpec>, ProblemInstance)>,
    title: String,
}

fn compile_with(args: &CommonArgs, p: &ProblemInstance, plan: &EncodingPlan) -> Result<CompiledHamiltonian, Failure> {
    let policy = input::penalty_policy(args, p)?;
    Ok(compiler::compile(p, plan, &policy)?)
}

fn prepare(args: &CommonArgs) -> Result<Prepared, Failure> {
    let source = input::load(&args.input)?;
    let kind = source.kind();
    Ok(match source {
        Source::Problem { spec, instance } => {
            let plan = input::encoding_plan(args, &instance)?;
            let h = compile_with(args, &instance, &plan)?;
            Prepared {
                h,
                title: describe(&instance),
                problem: Some((spec, instance)),
            }
        }
        Source::Compiled(h) => {
            input::reject_compile_flags(args, kind, true)?;
            let h = input::reweight(args, h)?;
            Prepared {
                h,
                problem: None,
                title: kind.to_string(),
            }
        }
        Source::Polynomial(p) => {
            input::reject_compile_flags(args, kind, false)?;
            Prepared {
                h: CompiledHamiltonian::from_polynomial(p),
                problem: None,
                title: kind.to_string(),
            }
        }
    })
}

pub fn compile(args: &CommonArgs) -> Result<(), Failure> {
    let prep = prepare(args)?;
    emit(args, &prep.h.to_json(), &report::compiled(&prep.h, &prep.title))
}

fn assignment_text(h: &CompiledHamiltonian, s: &Solution) -> String {
    let shown: Vec<String> = h
        .variables
        .iter()
        .filter(|ev| !ev.variable.slack)
        .map(|ev| match s.assignment.get(ev.id()).copied().flatten() {
            Some(v) => format!("{}={v}", ev.id()),
            None => format!("{}=?", ev.id()),
        })
        .collect();
    if shown.is_empty() {
        "-".into()
    } else {
        shown.join(" ")
    }
}

fn solutions_table(h: &CompiledHamiltonian, solutions: &[Solution]) -> String {
    let mut t = Table::new(["state", "energy", "feasible", "assignment"]);
    for s in solutions.iter().take(SHOWN_SOLUTIONS) {
        t.row([
            s.state_string(),
            num(s.energy),
            if s.feasible { "yes" } else { "no" }.to_string(),
            assignment_text(h, s),
        ]);
    }
    let mut out = t.render(2);
    if solutions.len() > SHOWN_SOLUTIONS {
        let _ = writeln!(out, "  ... {} more", solutions.len() - SHOWN_SOLUTIONS);
    }
    out
}

fn run_solver(h: &CompiledHamiltonian, args: &SolveArgs) -> Result<(Vec<Solution>, Value, String), Failure> {
    let mut out = String::new();
    match args.method {
        Method::Exhaustive => {
            let opts = ExhaustiveOptions {
                restrict_to_exported: !h.exported.is_empty(),
                max_spins: input::max_spins()?,
                ..ExhaustiveOptions::default()
            };
            let r = solve_exhaustive(h, &opts)?;
            let _ = writeln!(out, "exhaustive search over {} spins", h.num_spins);
            let _ = writeln!(out, "  states searched  {}", r.states_searched);
            let _ = writeln!(out, "  ground energy    {}", num(r.ground_energy));
            let _ = writeln!(out, "  degeneracy       {}", r.degeneracy);
            out.push_str(&solutions_table(h, &r.solutions));
            let artifact = json!({
                "method": "exhaustive",
                "num_spins": h.num_spins,
                "states_searched": r.states_searched,
                "ground_energy": r.ground_energy,
                "degeneracy": r.degeneracy,
                "solutions": r.solutions,
            });
            Ok((r.solutions, artifact, out))
        }
        Method::Sa => {
            if !h.exported.is_empty() {
                log::warn!("simulated annealing ignores the {} exported constraint(s)", h.exported.len());
            }
            let opts = SaOptions::for_hamiltonian(h, args.seed);
            let s = solve_sa(h, &opts)?;
            let _ = writeln!(
                out,
                "simulated annealing over {} spins ({} restarts x {} sweeps, seed {})",
                h.num_spins, opts.restarts, opts.sweeps, opts.seed
            );
            let _ = writeln!(out, "  best energy  {}", num(s.energy));
            out.push_str(&solutions_table(h, std::slice::from_ref(&s)));
            let artifact = json!({
                "method": "sa",
                "num_spins": h.num_spins,
                "schedule": opts,
                "ground_energy": s.energy,
                "solutions": [&s],
            });
            Ok((vec![s], artifact, out))
        }
    }
}

pub fn solve(args: &SolveArgs) -> Result<(), Failure> {
    let prep = prepare(&args.common)?;
    let (_, artifact, body) = run_solver(&prep.h, args)?;
    emit(&args.common, &artifact, &format!("{}\n{body}", prep.title))
}

pub fn verify(args: &SolveArgs) -> Result<(), Failure> {
    let prep = prepare(&args.common)?;
    let Some((spec, p)) = &prep.problem else {
        return Err(Failure::Input(
            "verify needs a problem or model instance, not a bare Hamiltonian".into(),
        ));
    };
    let oracle = match spec {
        Some(spec) => spec.oracle()?,
        None => instance_oracle(p)?,
    };
    let (solutions, solved, body) = run_solver(&prep.h, args)?;
    let r = check(p, &prep.h, &solutions, &oracle);

    let mut out = format!("{}\n{body}oracle\n", prep.title);
    let optimum = oracle.optimum.map_or("infeasible".to_string(), num);
    let _ = writeln!(out, "  optimum    {optimum}");
    let _ = writeln!(out, "  witnesses  {}", oracle.witnesses.len());
    let mut t = Table::new(["state", "objective", "feasible", "optimal witness"]);
    for c in r.checks.iter().take(SHOWN_SOLUTIONS) {
        t.row([
            c.state.clone(),
            c.objective.map_or("-".into(), num),
            if c.feasible { "yes" } else { "no" }.into(),
            if c.is_witness { "yes" } else { "no" }.into(),
        ]);
    }
    out.push_str("checks\n");
    out.push_str(&t.render(2));
    for f in &r.failures {
        let _ = writeln!(out, "  failure: {f}");
    }
    let verdict = if r.passed { "PASS" } else { "FAIL" };
    let _ = writeln!(out, "verification {verdict}");

    let artifact = json!({ "solve": solved, "oracle": oracle, "report": r });
    emit(&args.common, &artifact, &out)?;
    if r.passed {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{} verification failure(s)", r.failures.len())))
    }
}

fn compared_encodings() -> Vec<EncodingSpec> {
    vec![
        EncodingSpec::Binary,
        EncodingSpec::Gray,
        EncodingSpec::OneHot,
        EncodingSpec::OneHotXorCore { alpha: 0.5 },
        EncodingSpec::DomainWall,
        EncodingSpec::Unary,
    ]
}

pub fn resources(args: &CommonArgs) -> Result<(), Failure> {
    let source = input::load(&args.input)?;
    let kind = source.kind();
    let p = match source {
        Source::Problem { instance, .. } => instance,
        Source::Compiled(_) | Source::Polynomial(_) => {
            let prep = prepare(args)?;
            let stats = prep.h.total.stats();
            let body = format!("{}\n{}", prep.title, report::stats_block(&stats, prep.h.num_spins));
            let artifact = json!({ "hamiltonians": [{ "encoding": kind, "num_spins": prep.h.num_spins, "stats": stats }] });
            return emit(args, &artifact, &body);
        }
    };
    // User overrides sit on top of every compared default.
    let overrides = input::encoding_plan(args, &p)?;
    let encodings = compared_encodings();

    let mut vars = Table::new(
        ["variable".to_string(), "values".to_string()]
            .into_iter()
            .chain(encodings.iter().map(|e| e.to_string())),
    );
    let mut var_json = Vec::new();
    for v in &p.variables {
        let counts: Vec<usize> = encodings.iter().map(|e| e.spin_count(v.size())).collect();
        vars.row(
            [v.id.clone(), v.size().to_string()]
                .into_iter()
                .chain(counts.iter().map(|c| c.to_string())),
        );
        let spins: serde_json::Map<String, Value> =
            encodings.iter().zip(&counts).map(|(e, &c)| (e.to_string(), json!(c))).collect();
        var_json.push(json!({ "id": v.id, "size": v.size(), "spins": spins }));
    }

    let mut totals = Table::new(["encoding", "spins", "terms", "max order", "orders", "L1 norm"]);
    let mut ham_json = Vec::new();
    for e in &encodings {
        let mut plan = EncodingPlan::uniform(e.clone());
        plan.rules = overrides.rules.clone();
        let h = compile_with(args, &p, &plan)?;
        let stats = h.total.stats();
        totals.row([
            e.to_string(),
            h.num_spins.to_string(),
            stats.num_terms.to_string(),
            stats.max_order.to_string(),
            report::histogram(&stats),
            num(stats.l1_norm),
        ]);
        ham_json.push(json!({ "encoding": e.to_string(), "num_spins": h.num_spins, "stats": stats }));
    }
    let body = format!(
        "{}\nspins per variable\n{}hamiltonian per default encoding\n{}",
        describe(&p),
        vars.render(2),
        totals.render(2)
    );
    emit(args, &json!({ "variables": var_json, "hamiltonians": ham_json }), &body)
}

pub fn parity(args: &CommonArgs) -> Result<(), Failure> {
    let prep = prepare(args)?;
    let p = &prep.h.total;
    let mut pm = parity_transform(p)?;
    for c in &prep.h.exported {
        pm.remap_constraint(&c.label, &c.poly, c.target)?;
    }
    let r = verify_parity_equivalence(p, &pm)?;
    let q = quadratize(p);
    let logical = pm.logical_spins().len();

    let mut out = format!("{}\nparity transformation\n", prep.title);
    let mut t = Table::new(["quantity", "value"]);
    t.row(["logical spins".to_string(), logical.to_string()]);
    t.row(["parity spins".to_string(), pm.num_parity_spins().to_string()]);
    t.row(["rank".to_string(), r.rank.to_string()]);
    t.row(["closures".to_string(), pm.closures.len().to_string()]);
    t.row(["sum constraints".to_string(), pm.sum_constraints.len().to_string()]);
    t.row(["valid parity states".to_string(), r.valid_parity_states.to_string()]);
    t.row(["multiplicity".to_string(), r.multiplicity.to_string()]);
    out.push_str(&t.render(2));
    if !pm.closures.is_empty() {
        out.push_str("closures\n");
        for c in pm.closures.iter().take(SHOWN_SOLUTIONS) {
            let terms: Vec<String> = c
                .iter()
                .map(|&u| {
                    let spins: Vec<String> = pm.spins[u].term.iter().map(|i| format!("s{i}")).collect();
                    format!("σ{u}[{}]", spins.join(""))
                })
                .collect();
            let _ = writeln!(out, "  {}", terms.join(" · "));
        }
        if pm.closures.len() > SHOWN_SOLUTIONS {
            let _ = writeln!(out, "  ... {} more", pm.closures.len() - SHOWN_SOLUTIONS);
        }
    }
    out.push_str("quadratization\n");
    let mut t = Table::new(["quantity", "value"]);
    t.row(["spins".to_string(), q.num_spins().to_string()]);
    t.row(["ancillas".to_string(), q.ancillas.len().to_string()]);
    t.row(["two-body terms".to_string(), q.two_body_terms().to_string()]);
    out.push_str(&t.render(2));
    let verdict = if r.passed { "PASS" } else { "FAIL" };
    let _ = writeln!(out, "spectral equivalence {verdict}");

    let artifact = json!({
        "parity_map": pm.to_json(),
        "equivalence": r,
        "quadratized": {
            "num_spins": q.num_spins(),
            "ancillas": q.ancillas,
            "two_body_terms": q.two_body_terms(),
            "polynomial": q.poly,
        },
    });
    emit(args, &artifact, &out)?;
    if r.passed {
        Ok(())
    } else {
        Err(Failure::Verification("parity spectrum differs from the logical spectrum".into()))
    }
}
