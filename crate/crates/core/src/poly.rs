//! Exact multilinear polynomials over spin (`s = ±1`) and boolean (`x ∈ {0,1}`)
//! variables.
//!
//! Both flavours share one representation: a map from a sorted, duplicate-free
//! index set to a real coefficient, with the empty set holding the constant.
//! The only difference is the product rule for repeated indices: spins square
//! to one (`s_i² = 1`), booleans are idempotent (`x_i² = x_i`).
//!
//! The global bit convention is fixed here: a state bit `true` is the spin
//! value `+1` and the boolean value `1`, so `x = (s + 1) / 2`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::marker::PhantomData;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Identifier of one spin (or boolean) variable.
pub type SpinIndex = usize;

/// Coefficients with absolute value below this are dropped on normalization.
pub const ZERO_TOLERANCE: f64 = 1e-12;

/// Largest register [`SpinPolynomial::energy_table`] will materialize.
pub const MAX_TABLE_SPINS: usize = 30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("assignment of length {len} does not cover spin index {index}")]
    MissingIndex { index: SpinIndex, len: usize },
    #[error("energy table over {0} spins exceeds the {MAX_TABLE_SPINS}-spin limit")]
    TooManySpins(usize),
    #[error("term spins must be sorted ascending without duplicates, got {0:?}")]
    UnsortedTerm(Vec<SpinIndex>),
}

/// Sorted duplicate-free set of variable indices; the empty set is the constant monomial.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<SpinIndex>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn single(index: SpinIndex) -> Self {
        Monomial(vec![index])
    }

    /// Builds a monomial from indices that are already sorted and unique.
    pub fn from_sorted(indices: Vec<SpinIndex>) -> Result<Self, PolyError> {
        if indices.windows(2).all(|w| w[0] < w[1]) {
            Ok(Monomial(indices))
        } else {
            Err(PolyError::UnsortedTerm(indices))
        }
    }

    /// Product of spins: indices that appear an even number of times cancel.
    pub fn spin_product<I: IntoIterator<Item = SpinIndex>>(indices: I) -> Self {
        let mut v: Vec<SpinIndex> = indices.into_iter().collect();
        v.sort_unstable();
        let mut out = Vec::with_capacity(v.len());
        let mut i = 0;
        while i < v.len() {
            let mut j = i;
            while j < v.len() && v[j] == v[i] {
                j += 1;
            }
            if (j - i) % 2 == 1 {
                out.push(v[i]);
            }
            i = j;
        }
        Monomial(out)
    }

    /// Product of booleans: repeated indices collapse.
    pub fn bool_product<I: IntoIterator<Item = SpinIndex>>(indices: I) -> Self {
        let set: BTreeSet<SpinIndex> = indices.into_iter().collect();
        Monomial(set.into_iter().collect())
    }

    pub fn indices(&self) -> &[SpinIndex] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: SpinIndex) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    /// Bit mask of the indices; all must be below 64.
    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &i| m | (1u64 << i))
    }

    fn symmetric_difference(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    fn union(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    fn map_indices(&self, f: &impl Fn(SpinIndex) -> SpinIndex) -> Vec<SpinIndex> {
        self.0.iter().map(|&i| f(i)).collect()
    }
}

/// Product rule and point-evaluation rule of a variable flavour.
pub trait Algebra: Clone + fmt::Debug + PartialEq + Default + Send + Sync + 'static {
    fn product(a: &Monomial, b: &Monomial) -> Monomial;
    fn monomial<I: IntoIterator<Item = SpinIndex>>(indices: I) -> Monomial;
    fn value(bit: bool) -> f64;
}

/// Spin variables `s ∈ {−1, +1}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Spin;

/// Boolean variables `x ∈ {0, 1}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Boolean;

impl Algebra for Spin {
    fn product(a: &Monomial, b: &Monomial) -> Monomial {
        a.symmetric_difference(b)
    }
    fn monomial<I: IntoIterator<Item = SpinIndex>>(indices: I) -> Monomial {
        Monomial::spin_product(indices)
    }
    fn value(bit: bool) -> f64 {
        if bit {
            1.0
        } else {
            -1.0
        }
    }
}

impl Algebra for Boolean {
    fn product(a: &Monomial, b: &Monomial) -> Monomial {
        a.union(b)
    }
    fn monomial<I: IntoIterator<Item = SpinIndex>>(indices: I) -> Monomial {
        Monomial::bool_product(indices)
    }
    fn value(bit: bool) -> f64 {
        if bit {
            1.0
        } else {
            0.0
        }
    }
}

/// Multilinear real polynomial, canonical up to the zero tolerance.
#[derive(Clone, Default, PartialEq)]
pub struct Polynomial<A: Algebra> {
    terms: BTreeMap<Monomial, f64>,
    _algebra: PhantomData<A>,
}

pub type SpinPolynomial = Polynomial<Spin>;
pub type BooleanPolynomial = Polynomial<Boolean>;

impl<A: Algebra> Polynomial<A> {
    pub fn zero() -> Self {
        Polynomial {
            terms: BTreeMap::new(),
            _algebra: PhantomData,
        }
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    /// The single variable `index`.
    pub fn var(index: SpinIndex) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::single(index), 1.0);
        p
    }

    /// `coeff · ∏ indices`, reducing repeated indices by the algebra's rule.
    pub fn term<I: IntoIterator<Item = SpinIndex>>(indices: I, coeff: f64) -> Self {
        let mut p = Self::zero();
        p.add_term(A::monomial(indices), coeff);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, f64)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Accumulates `coeff` onto `mono`, dropping the entry if it becomes negligible.
    pub fn add_term(&mut self, mono: Monomial, coeff: f64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Occupied(mut e) => {
                let v = *e.get() + coeff;
                if v.abs() < ZERO_TOLERANCE {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            Entry::Vacant(e) => {
                if coeff.abs() >= ZERO_TOLERANCE {
                    e.insert(coeff);
                }
            }
        }
    }

    pub fn coefficient(&self, mono: &Monomial) -> f64 {
        self.terms.get(mono).copied().unwrap_or(0.0)
    }

    pub fn constant_term(&self) -> f64 {
        self.coefficient(&Monomial::one())
    }

    /// All stored terms in canonical order, constant included.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn non_constant_terms(&self) -> impl Iterator<Item = (&Monomial, f64)> + '_ {
        self.terms().filter(|(m, _)| !m.is_constant())
    }

    /// Number of stored terms, constant included.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Number of non-constant terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len() - usize::from(self.terms.contains_key(&Monomial::one()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.num_terms() == 0
    }

    pub fn max_order(&self) -> usize {
        self.terms.keys().map(Monomial::order).max().unwrap_or(0)
    }

    /// Sorted list of variables that appear in some term.
    pub fn variables(&self) -> Vec<SpinIndex> {
        let set: BTreeSet<SpinIndex> = self
            .terms
            .keys()
            .flat_map(|m| m.indices().iter().copied())
            .collect();
        set.into_iter().collect()
    }

    pub fn max_index(&self) -> Option<SpinIndex> {
        self.terms
            .keys()
            .filter_map(|m| m.indices().last().copied())
            .max()
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, &c)| (m.clone(), c * k)))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::constant(1.0);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Renames every variable through `f`; the map must be injective on this polynomial.
    pub fn relabel(&self, f: impl Fn(SpinIndex) -> SpinIndex) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(m, &c)| (A::monomial(m.map_indices(&f)), c)),
        )
    }

    /// Value at `state`, where `state[i]` is the bit of variable `i`.
    pub fn evaluate(&self, state: &[bool]) -> Result<f64, PolyError> {
        if let Some(max) = self.max_index() {
            if max >= state.len() {
                return Err(PolyError::MissingIndex {
                    index: max,
                    len: state.len(),
                });
            }
        }
        Ok(self.evaluate_unchecked(state))
    }

    /// Same as [`Polynomial::evaluate`] but panics on a short state.
    pub fn evaluate_unchecked(&self, state: &[bool]) -> f64 {
        self.terms
            .iter()
            .map(|(m, &c)| c * m.indices().iter().map(|&i| A::value(state[i])).product::<f64>())
            .sum()
    }

    /// Sum of absolute values of the non-constant coefficients.
    pub fn l1_norm(&self) -> f64 {
        self.non_constant_terms().map(|(_, c)| c.abs()).sum()
    }

    /// Resource summary in the style of encoding comparisons.
    pub fn stats(&self) -> ResourceStats {
        let mut order_histogram = BTreeMap::new();
        for (m, _) in self.non_constant_terms() {
            *order_histogram.entry(m.order()).or_insert(0) += 1;
        }
        ResourceStats {
            num_spins: self.variables().len(),
            num_terms: self.num_terms(),
            max_order: self.max_order(),
            order_histogram,
            l1_norm: self.l1_norm(),
            max_abs_coeff: self
                .non_constant_terms()
                .map(|(_, c)| c.abs())
                .fold(0.0, f64::max),
        }
    }
}

impl SpinPolynomial {
    /// Rewrites through `s_i = 2 x_i − 1`.
    pub fn to_boolean(&self) -> BooleanPolynomial {
        let mut out = BooleanPolynomial::zero();
        for (m, c) in self.terms() {
            let idx = m.indices();
            let k = idx.len();
            // ∏ (2x_i − 1) = Σ_S 2^|S| (−1)^(k−|S|) x_S
            for subset in 0u64..(1u64 << k) {
                let chosen: Vec<SpinIndex> = (0..k)
                    .filter(|b| subset >> b & 1 == 1)
                    .map(|b| idx[b])
                    .collect();
                let size = chosen.len();
                let sign = if (k - size).is_multiple_of(2) { 1.0 } else { -1.0 };
                out.add_term(Monomial(chosen), c * sign * (1u64 << size) as f64);
            }
        }
        out
    }

    /// Energies of all `2^n` states over spins `0..n`, indexed by the state's bit mask
    /// (bit `i` of the index is the bit of spin `i`). Computed with a fast
    /// Walsh–Hadamard transform of the coefficient vector.
    pub fn energy_table(&self, n: usize) -> Result<Vec<f64>, PolyError> {
        if n > MAX_TABLE_SPINS {
            return Err(PolyError::TooManySpins(n));
        }
        if let Some(max) = self.max_index() {
            if max >= n {
                return Err(PolyError::MissingIndex { index: max, len: n });
            }
        }
        let size = 1usize << n;
        let mut table = vec![0.0f64; size];
        for (m, c) in self.terms() {
            table[m.mask() as usize] += c;
        }
        walsh_hadamard(&mut table);
        // h[z] = Σ c_T (−1)^|T∧z| and the state b has (−1)^|T∖b|, so E(b) = h[!b].
        table.reverse();
        Ok(table)
    }
}

fn walsh_hadamard(a: &mut [f64]) {
    let n = a.len();
    let mut len = 1;
    while len < n {
        let butterfly = |chunk: &mut [f64]| {
            let (lo, hi) = chunk.split_at_mut(len);
            for (u, v) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*u, *v);
                *u = x + y;
                *v = x - y;
            }
        };
        if n >= 1 << 16 {
            a.par_chunks_mut(2 * len).for_each(butterfly);
        } else {
            a.chunks_mut(2 * len).for_each(butterfly);
        }
        len <<= 1;
    }
}

impl BooleanPolynomial {
    /// Rewrites through `x_i = (1 + s_i) / 2`.
    pub fn to_spin(&self) -> SpinPolynomial {
        let mut out = SpinPolynomial::zero();
        for (m, c) in self.terms() {
            let idx = m.indices();
            let k = idx.len();
            let scale = c / (1u64 << k) as f64;
            for subset in 0u64..(1u64 << k) {
                let chosen: Vec<SpinIndex> = (0..k)
                    .filter(|b| subset >> b & 1 == 1)
                    .map(|b| idx[b])
                    .collect();
                out.add_term(Monomial(chosen), scale);
            }
        }
        out
    }
}

/// Qubit and interaction-term counts of a Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceStats {
    pub num_spins: usize,
    pub num_terms: usize,
    pub max_order: usize,
    pub order_histogram: BTreeMap<usize, usize>,
    pub l1_norm: f64,
    pub max_abs_coeff: f64,
}

impl<A: Algebra> fmt::Debug for Polynomial<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<A: Algebra> fmt::Display for Polynomial<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let letter = if A::value(false) == 0.0 { 'x' } else { 's' };
        for (k, (m, c)) in self.terms().enumerate() {
            if k > 0 {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
                write!(f, "{}", c.abs())?;
            } else {
                write!(f, "{c}")?;
            }
            for i in m.indices() {
                write!(f, "·{letter}{i}")?;
            }
        }
        Ok(())
    }
}

impl<A: Algebra> From<f64> for Polynomial<A> {
    fn from(c: f64) -> Self {
        Self::constant(c)
    }
}

impl<'a, A: Algebra> Add<&'a Polynomial<A>> for &'a Polynomial<A> {
    type Output = Polynomial<A>;
    fn add(self, rhs: &'a Polynomial<A>) -> Polynomial<A> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<A: Algebra> Add for Polynomial<A> {
    type Output = Polynomial<A>;
    fn add(mut self, rhs: Polynomial<A>) -> Polynomial<A> {
        self += &rhs;
        self
    }
}

impl<A: Algebra> Add<f64> for Polynomial<A> {
    type Output = Polynomial<A>;
    fn add(mut self, rhs: f64) -> Polynomial<A> {
        self.add_term(Monomial::one(), rhs);
        self
    }
}

impl<'a, A: Algebra> AddAssign<&'a Polynomial<A>> for Polynomial<A> {
    fn add_assign(&mut self, rhs: &'a Polynomial<A>) {
        for (m, c) in rhs.terms() {
            self.add_term(m.clone(), c);
        }
    }
}

impl<A: Algebra> AddAssign for Polynomial<A> {
    fn add_assign(&mut self, rhs: Polynomial<A>) {
        *self += &rhs;
    }
}

impl<'a, A: Algebra> Sub<&'a Polynomial<A>> for &'a Polynomial<A> {
    type Output = Polynomial<A>;
    fn sub(self, rhs: &'a Polynomial<A>) -> Polynomial<A> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<A: Algebra> Sub for Polynomial<A> {
    type Output = Polynomial<A>;
    fn sub(mut self, rhs: Polynomial<A>) -> Polynomial<A> {
        self -= &rhs;
        self
    }
}

impl<A: Algebra> Sub<f64> for Polynomial<A> {
    type Output = Polynomial<A>;
    fn sub(mut self, rhs: f64) -> Polynomial<A> {
        self.add_term(Monomial::one(), -rhs);
        self
    }
}

impl<'a, A: Algebra> SubAssign<&'a Polynomial<A>> for Polynomial<A> {
    fn sub_assign(&mut self, rhs: &'a Polynomial<A>) {
        for (m, c) in rhs.terms() {
            self.add_term(m.clone(), -c);
        }
    }
}

impl<A: Algebra> SubAssign for Polynomial<A> {
    fn sub_assign(&mut self, rhs: Polynomial<A>) {
        *self -= &rhs;
    }
}

impl<'a, A: Algebra> Mul<&'a Polynomial<A>> for &'a Polynomial<A> {
    type Output = Polynomial<A>;
    fn mul(self, rhs: &'a Polynomial<A>) -> Polynomial<A> {
        let mut out = Polynomial::zero();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &rhs.terms {
                out.add_term(A::product(ma, mb), ca * cb);
            }
        }
        out
    }
}

impl<A: Algebra> Mul for Polynomial<A> {
    type Output = Polynomial<A>;
    fn mul(self, rhs: Polynomial<A>) -> Polynomial<A> {
        &self * &rhs
    }
}

impl<A: Algebra> Mul<f64> for Polynomial<A> {
    type Output = Polynomial<A>;
    fn mul(self, rhs: f64) -> Polynomial<A> {
        self.scale(rhs)
    }
}

impl<A: Algebra> Mul<f64> for &Polynomial<A> {
    type Output = Polynomial<A>;
    fn mul(self, rhs: f64) -> Polynomial<A> {
        self.scale(rhs)
    }
}

impl<'a, A: Algebra> MulAssign<&'a Polynomial<A>> for Polynomial<A> {
    fn mul_assign(&mut self, rhs: &'a Polynomial<A>) {
        *self = &*self * rhs;
    }
}

impl<A: Algebra> Neg for Polynomial<A> {
    type Output = Polynomial<A>;
    fn neg(self) -> Polynomial<A> {
        self.scale(-1.0)
    }
}

impl<A: Algebra> Neg for &Polynomial<A> {
    type Output = Polynomial<A>;
    fn neg(self) -> Polynomial<A> {
        self.scale(-1.0)
    }
}

impl<A: Algebra> std::iter::Sum for Polynomial<A> {
    fn sum<I: Iterator<Item = Polynomial<A>>>(iter: I) -> Self {
        let mut out = Polynomial::zero();
        for p in iter {
            out += &p;
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct WireTerm {
    spins: Vec<SpinIndex>,
    coeff: f64,
}

#[derive(Serialize, Deserialize)]
struct WirePolynomial {
    constant: f64,
    terms: Vec<WireTerm>,
}

impl<A: Algebra> Serialize for Polynomial<A> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        WirePolynomial {
            constant: self.constant_term(),
            terms: self
                .non_constant_terms()
                .map(|(m, c)| WireTerm {
                    spins: m.indices().to_vec(),
                    coeff: c,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, A: Algebra> Deserialize<'de> for Polynomial<A> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = WirePolynomial::deserialize(deserializer)?;
        let mut p = Polynomial::constant(wire.constant);
        for t in wire.terms {
            let m = Monomial::from_sorted(t.spins).map_err(serde::de::Error::custom)?;
            p.add_term(m, t.coeff);
        }
        Ok(p)
    }
}
