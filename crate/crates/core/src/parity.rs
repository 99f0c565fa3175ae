//! Parity transformation: every interaction term becomes one parity spin
//! whose local field is the term's coefficient. Closure constraints over
//! GF(2) restore consistency between the parity spins.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{left_null_space, rank, reduce_support, BitVec};
use crate::poly::{Monomial, SpinIndex, SpinPolynomial};

/// Enumeration bounds for [`verify_parity_equivalence`].
pub const MAX_LOGICAL_SPINS: usize = 16;
pub const MAX_PARITY_SPINS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParityError {
    #[error("polynomial has no interaction terms to transform")]
    ConstantPolynomial,
    #[error("constraint `{label}` has constant left side {constant} but target {target}")]
    DegenerateConstraint { label: String, constant: f64, target: f64 },
    #[error("enumeration bound exceeded: {logical} logical spins, {parity} parity spins")]
    TooLarge { logical: usize, parity: usize },
}

/// Sum constraint over parity spins: `Σ coeff_u σ_u = target`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemappedConstraint {
    pub label: String,
    pub coeffs: Vec<ParityCoeff>,
    pub target: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityCoeff {
    pub spin: usize,
    pub coeff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParitySpin {
    /// Logical spins whose product this parity spin represents.
    pub term: Vec<SpinIndex>,
    pub field: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityMap {
    pub constant: f64,
    pub spins: Vec<ParitySpin>,
    /// Each set of parity spins must multiply to +1.
    pub closures: Vec<Vec<usize>>,
    pub sum_constraints: Vec<RemappedConstraint>,
}

impl ParityMap {
    pub fn num_parity_spins(&self) -> usize {
        self.spins.len()
    }

    /// Logical spins touched by any parity spin, ascending.
    pub fn logical_spins(&self) -> Vec<SpinIndex> {
        let mut all: Vec<SpinIndex> = self.spins.iter().flat_map(|p| p.term.iter().copied()).collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn spin_of(&self, term: &Monomial) -> Option<usize> {
        self.spins.iter().position(|p| p.term == term.indices())
    }

    /// GF(2) rank of the term exponent matrix.
    pub fn rank(&self) -> usize {
        rank(&self.exponent_rows())
    }

    fn exponent_rows(&self) -> Vec<BitVec> {
        let logical = self.logical_spins();
        let pos: BTreeMap<SpinIndex, usize> = logical.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        self.spins
            .iter()
            .map(|p| BitVec::from_indices(logical.len(), p.term.iter().map(|i| pos[i])))
            .collect()
    }

    fn recompute_closures(&mut self) {
        let null = reduce_support(left_null_space(&self.exponent_rows()));
        self.closures = null.iter().map(BitVec::ones).collect();
    }

    /// True iff the parity state satisfies every closure constraint.
    pub fn closures_hold(&self, parity_state: &[bool]) -> bool {
        // A product of ±1 spins is +1 iff an even number of them is −1.
        self.closures
            .iter()
            .all(|c| c.iter().filter(|&&u| !parity_state[u]).count() % 2 == 0)
    }

    /// Energy `constant + Σ field_u σ_u` of a parity state.
    pub fn energy(&self, parity_state: &[bool]) -> f64 {
        self.constant
            + self
                .spins
                .iter()
                .zip(parity_state)
                .map(|(p, &b)| if b { p.field } else { -p.field })
                .sum::<f64>()
    }

    /// Parity state induced by a logical state.
    pub fn parity_state(&self, logical_state: &[bool]) -> Vec<bool> {
        self.spins
            .iter()
            .map(|p| p.term.iter().filter(|&&i| !logical_state[i]).count() % 2 == 0)
            .collect()
    }

    /// Rewrites `lhs = target` over parity spins, adding spins with zero field
    /// for terms not present yet.
    pub fn remap_constraint(
        &mut self,
        label: &str,
        lhs: &SpinPolynomial,
        target: f64,
    ) -> Result<RemappedConstraint, ParityError> {
        let constant = lhs.constant_term();
        if lhs.is_constant() {
            if (constant - target).abs() > 1e-9 {
                return Err(ParityError::DegenerateConstraint {
                    label: label.to_string(),
                    constant,
                    target,
                });
            }
            let rc = RemappedConstraint {
                label: label.to_string(),
                coeffs: Vec::new(),
                target: 0.0,
            };
            self.sum_constraints.push(rc.clone());
            return Ok(rc);
        }
        let mut extended = false;
        let mut coeffs = Vec::new();
        for (m, c) in lhs.non_constant_terms() {
            let spin = match self.spin_of(m) {
                Some(u) => u,
                None => {
                    self.spins.push(ParitySpin {
                        term: m.indices().to_vec(),
                        field: 0.0,
                    });
                    extended = true;
                    self.spins.len() - 1
                }
            };
            coeffs.push(ParityCoeff { spin, coeff: c });
        }
        if extended {
            self.recompute_closures();
        }
        let rc = RemappedConstraint {
            label: label.to_string(),
            coeffs,
            target: target - constant,
        };
        self.sum_constraints.push(rc.clone());
        Ok(rc)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("parity map serializes")
    }
}

/// One parity spin per non-constant term, with a reduced closure basis.
pub fn parity_transform(p: &SpinPolynomial) -> Result<ParityMap, ParityError> {
    if p.is_constant() {
        return Err(ParityError::ConstantPolynomial);
    }
    let mut pm = ParityMap {
        constant: p.constant_term(),
        spins: p
            .non_constant_terms()
            .map(|(m, c)| ParitySpin {
                term: m.indices().to_vec(),
                field: c,
            })
            .collect(),
        closures: Vec::new(),
        sum_constraints: Vec::new(),
    };
    pm.recompute_closures();
    Ok(pm)
}

/// Outcome of comparing the logical and the constrained parity spectra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityReport {
    pub passed: bool,
    pub logical_spins: usize,
    pub parity_spins: usize,
    pub rank: usize,
    /// Logical states mapped onto each closure-satisfying parity state.
    pub multiplicity: u64,
    pub valid_parity_states: usize,
    /// Sorted, one entry per logical state.
    pub logical_spectrum: Vec<f64>,
    /// Sorted, one entry per closure-satisfying parity state.
    pub parity_spectrum: Vec<f64>,
    /// Closure products that fail to reduce to the identity (should be empty).
    pub broken_closures: Vec<usize>,
}

/// Enumerates both sides and checks that the logical spectrum equals the
/// closure-constrained parity spectrum, each parity level repeated by the
/// kernel multiplicity `2^(L − rank)`.
pub fn verify_parity_equivalence(p: &SpinPolynomial, pm: &ParityMap) -> Result<ParityReport, ParityError> {
    let logical = pm.logical_spins();
    let (l, np) = (logical.len(), pm.num_parity_spins());
    if l > MAX_LOGICAL_SPINS || np > MAX_PARITY_SPINS {
        return Err(ParityError::TooLarge {
            logical: l,
            parity: np,
        });
    }
    let broken_closures: Vec<usize> = pm
        .closures
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            let product = Monomial::spin_product(c.iter().flat_map(|&u| pm.spins[u].term.iter().copied()));
            !product.is_constant()
        })
        .map(|(k, _)| k)
        .collect();

    let pos: BTreeMap<SpinIndex, usize> = logical.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let local = p.relabel(|i| *pos.get(&i).expect("polynomial spins are covered by the map"));
    let mut logical_spectrum = local.energy_table(l).expect("bounded register");
    logical_spectrum.sort_by(f64::total_cmp);

    let mut parity_spectrum: Vec<f64> = (0u64..1 << np)
        .into_par_iter()
        .filter_map(|z| {
            let state: Vec<bool> = (0..np).map(|u| z >> u & 1 == 1).collect();
            pm.closures_hold(&state).then(|| pm.energy(&state))
        })
        .collect();
    parity_spectrum.sort_by(f64::total_cmp);

    let r = pm.rank();
    let multiplicity = 1u64 << (l - r);
    let expanded = parity_spectrum
        .iter()
        .flat_map(|&e| std::iter::repeat_n(e, multiplicity as usize));
    let spectra_match = logical_spectrum.len() == parity_spectrum.len() * multiplicity as usize
        && logical_spectrum
            .iter()
            .zip(expanded)
            .all(|(a, b)| (a - b).abs() < 1e-9);
    Ok(ParityReport {
        passed: spectra_match && broken_closures.is_empty(),
        logical_spins: l,
        parity_spins: np,
        rank: r,
        multiplicity,
        valid_parity_states: parity_spectrum.len(),
        logical_spectrum,
        parity_spectrum,
        broken_closures,
    })
}
