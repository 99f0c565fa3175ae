//! k-SAT, syndrome decoding and linear systems over GF(2).

use serde::{Deserialize, Serialize};

use super::{bits_of, check_space, invalid, labelings, named, space, Best, OracleResult, ProblemError};
use crate::gf2::{self, BitVec};
use crate::model::{Constraint, DiscreteVariable, Expr, ProblemInstance};

fn binary_vars(p: &mut ProblemInstance, prefix: &str, n: usize) -> Result<Vec<DiscreteVariable>, ProblemError> {
    (0..n)
        .map(|i| Ok(p.add_variable(DiscreteVariable::new(format!("{prefix}_{i}"), 0, 1)?)))
        .collect()
}

/// `1 − 2x`: the ±1 sign of a binary variable.
fn sign(x: &DiscreteVariable) -> Expr {
    Expr::one() - x.value() * 2.0
}

fn parity_sign(bit: bool) -> f64 {
    if bit {
        -1.0
    } else {
        1.0
    }
}

fn to_bits(rows: &[Vec<u8>], what: &str) -> Result<Vec<BitVec>, ProblemError> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    for r in rows {
        if r.len() != cols || r.iter().any(|&b| b > 1) {
            return invalid(format!("{what} must be a rectangular 0/1 matrix"));
        }
        out.push(BitVec::from_bools(&r.iter().map(|&b| b == 1).collect::<Vec<_>>()));
    }
    Ok(out)
}

fn to_vec(bits: &[u8], what: &str) -> Result<BitVec, ProblemError> {
    if bits.iter().any(|&b| b > 1) {
        return invalid(format!("{what} must be a 0/1 vector"));
    }
    Ok(BitVec::from_bools(&bits.iter().map(|&b| b == 1).collect::<Vec<_>>()))
}

fn from_bitvec(v: &BitVec) -> Vec<u8> {
    v.to_bools().into_iter().map(u8::from).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KsatMode {
    /// Count violated clauses over `x_1..x_n`.
    #[default]
    Clause,
    /// Maximum independent set on the literal-occurrence graph.
    Mis,
}

/// CNF formula with DIMACS literals: `3` is `x_3`, `-3` is `¬x_3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ksat {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i64>>,
    #[serde(default)]
    pub mode: KsatMode,
}

impl Ksat {
    fn check(&self) -> Result<(), ProblemError> {
        for c in &self.clauses {
            if c.is_empty() {
                return invalid("empty clause");
            }
            if c.iter().any(|&l| l == 0 || l.unsigned_abs() as usize > self.num_vars) {
                return invalid(format!("clause {c:?} uses a literal outside ±1..{}", self.num_vars));
            }
        }
        Ok(())
    }

    fn literal_satisfied(l: i64, x: &[bool]) -> bool {
        x[l.unsigned_abs() as usize - 1] == (l > 0)
    }

    /// Literal occurrences `(clause, position)` in order.
    fn occurrences(&self) -> Vec<(usize, usize)> {
        self.clauses
            .iter()
            .enumerate()
            .flat_map(|(j, c)| (0..c.len()).map(move |p| (j, p)))
            .collect()
    }

    /// Edges of the occurrence graph: same clause, or complementary literals.
    fn conflict_edges(&self) -> Vec<(usize, usize)> {
        let occ = self.occurrences();
        let mut edges = Vec::new();
        for a in 0..occ.len() {
            for b in a + 1..occ.len() {
                let (ja, pa) = occ[a];
                let (jb, pb) = occ[b];
                if ja == jb || self.clauses[ja][pa] == -self.clauses[jb][pb] {
                    edges.push((a, b));
                }
            }
        }
        edges
    }

    fn occurrence_id((j, p): (usize, usize)) -> String {
        format!("z_{j}_{p}")
    }

    /// The formula is satisfiable iff the MIS objective reaches `−m`.
    pub fn satisfiable_from_mis(&self, optimum: f64) -> bool {
        (optimum + self.clauses.len() as f64).abs() < 1e-9
    }

    pub fn build(&self) -> Result<ProblemInstance, ProblemError> {
        self.check()?;
        let mut p = ProblemInstance::new("ksat", "satisfy a CNF formula");
        match self.mode {
            KsatMode::Clause => {
                let x: Vec<DiscreteVariable> = (1..=self.num_vars)
                    .map(|i| p.add_variable(DiscreteVariable::new(format!("x_{i}"), 0, 1).expect("binary range")))
                    .collect();
                let literal = |l: i64| {
                    let v = x[l.unsigned_abs() as usize - 1].value();
                    if l > 0 {
                        v
                    } else {
                        Expr::one() - v
                    }
                };
                p.objective = Expr::sum(
                    self.clauses
                        .iter()
                        .map(|c| Expr::prod(c.iter().map(|&l| Expr::one() - literal(l)))),
                );
            }
            KsatMode::Mis => {
                let occ = self.occurrences();
                let z: Vec<DiscreteVariable> = occ
                    .iter()
                    .map(|&o| p.add_variable(DiscreteVariable::new(Self::occurrence_id(o), 0, 1).expect("binary range")))
                    .collect();
                p.objective = -Expr::sum(z.iter().map(DiscreteVariable::value));
                let c = Expr::sum(self.conflict_edges().into_iter().map(|(a, b)| z[a].value() * z[b].value()));
                p.add_constraint(Constraint::eq(c, 0.0, "independent").one_sided());
            }
        }
        Ok(p)
    }

    pub fn oracle(&self) -> Result<OracleResult, ProblemError> {
        self.check()?;
        let mut best = Best::default();
        match self.mode {
            KsatMode::Clause => {
                check_space(space(2, self.num_vars))?;
                for z in 0..1u64 << self.num_vars {
                    let x = bits_of(z, self.num_vars);
                    let violated = self
                        .clauses
                        .iter()
                        .filter(|c| !c.iter().any(|&l| Self::literal_satisfied(l, &x)))
                        .count();
                    best.offer(violated as f64, || {
                        x.iter().enumerate().map(|(i, &b)| (format!("x_{}", i + 1), b as i64)).collect()
                    });
                }
            }
            KsatMode::Mis => {
                // Pick at most one literal per clause (choice 0 means none),
                // rejecting complementary picks.
                let widths: Vec<usize> = self.clauses.iter().map(|c| c.len() + 1).collect();
                let states: u64 = widths.iter().map(|&w| w as u64).product();
                check_space(states)?;
                let base = widths.iter().copied().max().unwrap_or(1);
                for choice in labelings(base, self.clauses.len()) {
                    if choice.iter().zip(&widths).any(|(&c, &w)| c >= w) {
                        continue;
                    }
                    let picked: Vec<i64> = choice
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c > 0)
                        .map(|(j, &c)| self.clauses[j][c - 1])
                        .collect();
                    if picked.iter().any(|&l| picked.contains(&-l)) {
                        continue;
                    }
                    best.offer(-(picked.len() as f64), || {
                        self.occurrences()
                            .into_iter()
                            .map(|(j, p)| (Self::occurrence_id((j, p)), (choice[j] == p + 1) as i64))
                            .collect()
                    });
                }
            }
        }
        Ok(best.finish())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyndromeForm {
    /// Error bits `e_l` with a syndrome-mismatch term and a weight term.
    #[default]
    Check,
    /// Logical bits `u_l` of the error `e = uG + v`.
    Generator,
}

/// Minimum-weight error with a given syndrome `eHᵀ = η`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyndromeDecoding {
    pub check: Vec<Vec<u8>>,
    pub syndrome: Vec<u8>,
    #[serde(default)]
    pub form: SyndromeForm,
    /// Rows span the code; derived from `check` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Vec<Vec<u8>>>,
    /// Weight of the mismatch term; defaults to `2n + 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    /// Weight of the error-weight term; defaults to 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
}

/// Check matrix of the [7,4] Hamming code: column `j` is `j + 1` in binary.
pub fn hamming_7_4() -> Vec<Vec<u8>> {
    (0..3)
        .map(|r| (1..=7u8).map(|c| (c >> r) & 1).collect())
        .collect()
}

/// Generator rows spanning `{ x : H x = 0 }`.
pub fn generator_from_check(check: &[Vec<u8>]) -> Result<Vec<Vec<u8>>, ProblemError> {
    let h = to_bits(check, "check matrix")?;
    Ok(gf2::reduce_support(gf2::null_space(&h)).iter().map(from_bitvec).collect())
}

/// Some `v` with `H v = η`; `None` if the syndrome is not reachable.
pub fn particular_solution(check: &[Vec<u8>], syndrome: &[u8]) -> Result<Option<Vec<u8>>, ProblemError> {
    let h = to_bits(check, "check matrix")?;
    if h.len() != syndrome.len() {
        return invalid("syndrome length must equal the number of checks");
    }
    let eta = to_vec(syndrome, "syndrome")?;
    Ok(gf2::solve(&h, &eta).map(|v| from_bitvec(&v)))
}

impl SyndromeDecoding {
    pub fn new(check: Vec<Vec<u8>>, syndrome: Vec<u8>, form: SyndromeForm) -> Self {
        SyndromeDecoding {
            check,
            syndrome,
            form,
            generator: None,
            c1: None,
            c2: None,
        }
    }

    /// Syndrome of `error` under the check matrix.
    pub fn syndrome_of(check: &[Vec<u8>], error: &[u8]) -> Vec<u8> {
        check
            .iter()
            .map(|r| r.iter().zip(error).map(|(&a, &b)| a & b).fold(0, |x, y| x ^ y))
            .collect()
    }

    fn n(&self) -> usize {
        self.check.first().map_or(0, Vec::len)
    }

    fn weights(&self) -> (f64, f64) {
        (self.c1.unwrap_or((2 * self.n() + 1) as f64), self.c2.unwrap_or(1.0))
    }

    fn generator_rows(&self) -> Result<Vec<Vec<u8>>, ProblemError> {
        match &self.generator {
            Some(g) => {
                to_bits(g, "generator matrix")?;
                if g.iter().any(|r| r.len() != self.n()) {
                    return invalid("generator and check matrices differ in length");
                }
                Ok(g.clone())
            }
            None => generator_from_check(&self.check),
        }
    }

    fn offset(&self) -> Result<Vec<u8>, ProblemError> {
        particular_solution(&self.check, &self.syndrome)?
            .map_or_else(|| invalid("syndrome is not reachable by any error"), Ok)
    }

    fn check_inputs(&self) -> Result<(), ProblemError> {
        to_bits(&self.check, "check matrix")?;
        to_vec(&self.syndrome, "syndrome")?;
        if self.check.len() != self.syndrome.len() {
            return invalid("syndrome length must equal the number of checks");
        }
        Ok(())
    }

    /// Error `uG + v` for logical bits `u` in the generator form.
    pub fn error_from_logical(&self, u: &[u8]) -> Result<Vec<u8>, ProblemError> {
        let g = self.generator_rows()?;
        let mut e = self.offset()?;
        for (row, &bit) in g.iter().zip(u) {
            if bit == 1 {
                for (x, &r) in e.iter_mut().zip(row) {
                    *x ^= r;
                }
            }
        }
        Ok(e)
    }

    pub fn build(&self) -> Result<ProblemInstance, ProblemError> {
        self.check_inputs()?;
        let mut p = ProblemInstance::new("syndrome_decoding", "lowest-weight error matching the syndrome");
        match self.form {
            SyndromeForm::Check => {
                let (c1, c2) = self.weights();
                let e = binary_vars(&mut p, "e", self.n())?;
                // Each term is 1 exactly when check r disagrees with η_r.
                let mismatch = Expr::sum(self.check.iter().zip(&self.syndrome).map(|(row, &eta)| {
                    let parity = Expr::prod(row.iter().zip(&e).filter(|(&h, _)| h == 1).map(|(_, x)| sign(x)));
                    (Expr::one() - parity * parity_sign(eta == 1)) * 0.5
                }));
                let weight = Expr::sum(e.iter().map(|x| x.indicator(1)));
                p.objective = mismatch * c1 + weight * c2;
            }
            SyndromeForm::Generator => {
                let g = self.generator_rows()?;
                let v = self.offset()?;
                let u = binary_vars(&mut p, "u", g.len())?;
                p.objective = Expr::sum((0..self.n()).map(|j| {
                    let parity = Expr::prod(g.iter().zip(&u).filter(|(row, _)| row[j] == 1).map(|(_, x)| sign(x)));
                    (Expr::one() - parity * parity_sign(v[j] == 1)) * 0.5
                }));
            }
        }
        Ok(p)
    }

    pub fn oracle(&self) -> Result<OracleResult, ProblemError> {
        self.check_inputs()?;
        let n = self.n();
        let mut best = Best::default();
        match self.form {
            SyndromeForm::Check => {
                let (c1, c2) = self.weights();
                check_space(space(2, n))?;
                for z in 0..1u64 << n {
                    let e: Vec<u8> = bits_of(z, n).into_iter().map(u8::from).collect();
                    let s = Self::syndrome_of(&self.check, &e);
                    let mismatches = s.iter().zip(&self.syndrome).filter(|(a, b)| a != b).count();
                    let weight = e.iter().filter(|&&b| b == 1).count();
                    best.offer(c1 * mismatches as f64 + c2 * weight as f64, || {
                        named("e", e.iter().enumerate().map(|(i, &b)| (i, b as i64)))
                    });
                }
            }
            SyndromeForm::Generator => {
                let k = self.generator_rows()?.len();
                check_space(space(2, k))?;
                for z in 0..1u64 << k {
                    let u: Vec<u8> = bits_of(z, k).into_iter().map(u8::from).collect();
                    let e = self.error_from_logical(&u)?;
                    let weight = e.iter().filter(|&&b| b == 1).count();
                    best.offer(weight as f64, || named("u", u.iter().enumerate().map(|(i, &b)| (i, b as i64))));
                }
            }
        }
        Ok(best.finish())
    }
}

/// Minimizes the Hamming distance between `xA` and `y` over GF(2). The
/// objective is `2·dist(xA, y) − n`, where `n` is the length of `y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mod2LinProg {
    pub a: Vec<Vec<u8>>,
    pub y: Vec<u8>,
}

impl Mod2LinProg {
    fn check(&self) -> Result<(), ProblemError> {
        to_bits(&self.a, "matrix")?;
        to_vec(&self.y, "target")?;
        if self.a.iter().any(|r| r.len() != self.y.len()) {
            return invalid("every row of A must have the length of y");
        }
        Ok(())
    }

    pub fn build(&self) -> Result<ProblemInstance, ProblemError> {
        self.check()?;
        let mut p = ProblemInstance::new("mod2_linprog", "closest xA to y over GF(2)");
        let x = binary_vars(&mut p, "x", self.a.len())?;
        p.objective = -Expr::sum(self.y.iter().enumerate().map(|(j, &yj)| {
            Expr::prod(self.a.iter().zip(&x).filter(|(row, _)| row[j] == 1).map(|(_, v)| sign(v))) * parity_sign(yj == 1)
        }));
        Ok(p)
    }

    pub fn oracle(&self) -> Result<OracleResult, ProblemError> {
        self.check()?;
        let (l, n) = (self.a.len(), self.y.len());
        check_space(space(2, l))?;
        let mut best = Best::default();
        for z in 0..1u64 << l {
            let x = bits_of(z, l);
            let dist = (0..n)
                .filter(|&j| {
                    let bit = (0..l).filter(|&i| x[i] && self.a[i][j] == 1).count() % 2 == 1;
                    bit != (self.y[j] == 1)
                })
                .count();
            best.offer(2.0 * dist as f64 - n as f64, || {
                named("x", x.iter().enumerate().map(|(i, &b)| (i, b as i64)))
            });
        }
        Ok(best.finish())
    }
}
