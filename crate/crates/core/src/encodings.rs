//! Spin-register encodings of discrete variables.
//!
//! Every encoding maps the value index `k = v − lo` to a register state and
//! provides polynomials for the value, for each value indicator, and for the
//! core term that singles out the valid states of sparse registers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::DiscreteVariable;
use crate::poly::{SpinIndex, SpinPolynomial};

/// Registers larger than this are not enumerated by [`core_ground_set`].
pub const MAX_ENUMERATED_REGISTER: usize = 24;

/// Unary indicators grow combinatorially beyond this many spins.
const UNARY_WARN_SPINS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EncodingError {
    #[error("xor core parameter alpha = {0} must lie strictly between 0 and 1")]
    InvalidAlpha(f64),
    #[error("block encoding with {blocks} blocks of {g} bits holds {capacity} values but `{id}` needs {size}")]
    BlockTooSmall {
        id: String,
        blocks: usize,
        g: usize,
        capacity: usize,
        size: usize,
    },
    #[error("block encoding needs at least one block of at least one bit")]
    EmptyBlock,
    #[error("register of {0} spins is too large to enumerate")]
    RegisterTooLarge(usize),
    #[error("cannot parse encoding `{0}`")]
    Parse(String),
}

/// Encoding used inside each block of a block encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerKind {
    Binary,
    Gray,
    Unary,
}

impl InnerKind {
    /// Number of nonzero values one block of `g` bits can represent.
    pub fn capacity(self, g: usize) -> usize {
        match self {
            InnerKind::Binary | InnerKind::Gray => (1usize << g) - 1,
            InnerKind::Unary => g,
        }
    }

    fn name(self) -> &'static str {
        match self {
            InnerKind::Binary => "binary",
            InnerKind::Gray => "gray",
            InnerKind::Unary => "unary",
        }
    }
}

fn default_alpha() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EncodingSpec {
    Binary,
    Gray,
    OneHot,
    OneHotXorCore {
        #[serde(default = "default_alpha")]
        alpha: f64,
    },
    DomainWall,
    Unary,
    Block {
        #[serde(rename = "B")]
        blocks: usize,
        g: usize,
        inner: InnerKind,
    },
}

impl EncodingSpec {
    /// Every register state encodes a value (barring unused codewords).
    pub fn is_dense(&self) -> bool {
        matches!(
            self,
            EncodingSpec::Binary | EncodingSpec::Gray | EncodingSpec::Unary
        )
    }

    /// Register size for a variable with `size` values.
    pub fn spin_count(&self, size: usize) -> usize {
        match self {
            EncodingSpec::Binary | EncodingSpec::Gray => dense_bits(size),
            EncodingSpec::OneHot | EncodingSpec::OneHotXorCore { .. } => size,
            EncodingSpec::DomainWall | EncodingSpec::Unary => size - 1,
            EncodingSpec::Block { blocks, g, .. } => blocks * g,
        }
    }

    /// Values representable without counting the core, ≥ the range size.
    pub fn capacity(&self, size: usize) -> usize {
        match self {
            EncodingSpec::Binary | EncodingSpec::Gray => 1 << dense_bits(size),
            EncodingSpec::Block { blocks, g, inner } => blocks * inner.capacity(*g),
            _ => size,
        }
    }
}

impl fmt::Display for EncodingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncodingSpec::Binary => write!(f, "binary"),
            EncodingSpec::Gray => write!(f, "gray"),
            EncodingSpec::OneHot => write!(f, "one_hot"),
            EncodingSpec::OneHotXorCore { alpha } => write!(f, "one_hot_xor_core:{alpha}"),
            EncodingSpec::DomainWall => write!(f, "domain_wall"),
            EncodingSpec::Unary => write!(f, "unary"),
            EncodingSpec::Block { blocks, g, inner } => {
                write!(f, "block:{blocks}:{g}:{}", inner.name())
            }
        }
    }
}

impl FromStr for EncodingSpec {
    type Err = EncodingError;

    /// Accepts `binary`, `gray`, `one_hot`, `one_hot_xor_core[:alpha]`,
    /// `domain_wall`, `unary` and `block:B:g:inner`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || EncodingError::Parse(s.to_string());
        let parts: Vec<&str> = s.trim().split(':').collect();
        let spec = match parts.as_slice() {
            ["binary"] => EncodingSpec::Binary,
            ["gray"] => EncodingSpec::Gray,
            ["one_hot"] => EncodingSpec::OneHot,
            ["one_hot_xor_core"] => EncodingSpec::OneHotXorCore { alpha: 0.5 },
            ["one_hot_xor_core", a] => EncodingSpec::OneHotXorCore {
                alpha: a.parse().map_err(|_| err())?,
            },
            ["domain_wall"] => EncodingSpec::DomainWall,
            ["unary"] => EncodingSpec::Unary,
            ["block", b, g, inner] => EncodingSpec::Block {
                blocks: b.parse().map_err(|_| err())?,
                g: g.parse().map_err(|_| err())?,
                inner: match *inner {
                    "binary" => InnerKind::Binary,
                    "gray" => InnerKind::Gray,
                    "unary" => InnerKind::Unary,
                    _ => return Err(err()),
                },
            },
            _ => return Err(err()),
        };
        Ok(spec)
    }
}

/// Core term of a register in both of its forms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Core {
    /// Nonnegative, zero exactly on valid states.
    pub penalty: SpinPolynomial,
    /// Unsquared polynomial that equals `target` exactly on valid states.
    pub sum: SpinPolynomial,
    pub target: f64,
}

impl Core {
    fn from_penalty(penalty: SpinPolynomial) -> Self {
        Core {
            sum: penalty.clone(),
            penalty,
            target: 0.0,
        }
    }
}

/// A discrete variable bound to a contiguous block of spins.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedVariable {
    pub variable: DiscreteVariable,
    pub spec: EncodingSpec,
    pub spins: Vec<SpinIndex>,
    pub value_poly: SpinPolynomial,
    pub indicators: BTreeMap<i64, SpinPolynomial>,
    pub core: Option<Core>,
}

impl EncodedVariable {
    pub fn id(&self) -> &str {
        &self.variable.id
    }

    pub fn num_spins(&self) -> usize {
        self.spins.len()
    }

    /// Indicator polynomial of `alpha`, zero outside the range.
    pub fn indicator(&self, alpha: i64) -> SpinPolynomial {
        self.indicators
            .get(&alpha)
            .cloned()
            .unwrap_or_else(SpinPolynomial::zero)
    }

    /// Register bits extracted from a full state.
    pub fn local_bits(&self, state: &[bool]) -> Vec<bool> {
        self.spins.iter().map(|&i| state[i]).collect()
    }

    /// Decodes from a full spin state; `None` on invalid register states.
    pub fn decode(&self, state: &[bool]) -> Option<i64> {
        self.decode_local(&self.local_bits(state))
    }

    /// Decodes register-local bits.
    pub fn decode_local(&self, bits: &[bool]) -> Option<i64> {
        let size = self.variable.size();
        let k = match &self.spec {
            EncodingSpec::Binary => Some(bits_to_int(bits)),
            EncodingSpec::Gray => Some(gray_decode(bits_to_int(bits))),
            EncodingSpec::OneHot | EncodingSpec::OneHotXorCore { .. } => {
                let mut ones = bits.iter().enumerate().filter(|(_, &b)| b);
                match (ones.next(), ones.next()) {
                    (Some((k, _)), None) => Some(k),
                    _ => None,
                }
            }
            EncodingSpec::DomainWall => {
                // Valid iff the chain −1 … −1 +1 … +1 has a single wall.
                let first = bits.iter().position(|&b| b).unwrap_or(bits.len());
                if bits[first..].iter().all(|&b| b) {
                    Some(first)
                } else {
                    None
                }
            }
            EncodingSpec::Unary => Some(bits.iter().filter(|&&b| b).count()),
            EncodingSpec::Block { g, inner, .. } => {
                let cap = inner.capacity(*g);
                let mut active = bits
                    .chunks(*g)
                    .enumerate()
                    .filter(|(_, c)| c.iter().any(|&b| b));
                match (active.next(), active.next()) {
                    (Some((b, chunk)), None) => {
                        let w = match inner {
                            InnerKind::Binary => bits_to_int(chunk),
                            InnerKind::Gray => gray_decode(bits_to_int(chunk)),
                            InnerKind::Unary => chunk.iter().filter(|&&x| x).count(),
                        };
                        Some(b * cap + w - 1)
                    }
                    _ => None,
                }
            }
        }?;
        (k < size).then(|| self.variable.lo + k as i64)
    }

    /// A register state representing `value`.
    pub fn encode_value(&self, value: i64) -> Option<Vec<bool>> {
        if !self.variable.contains(value) {
            return None;
        }
        let k = (value - self.variable.lo) as usize;
        let n = self.num_spins();
        Some(match &self.spec {
            EncodingSpec::Binary => int_to_bits(k, n),
            EncodingSpec::Gray => int_to_bits(gray_encode(k), n),
            EncodingSpec::OneHot | EncodingSpec::OneHotXorCore { .. } => {
                (0..n).map(|i| i == k).collect()
            }
            EncodingSpec::DomainWall => (0..n).map(|j| j >= k).collect(),
            EncodingSpec::Unary => (0..n).map(|j| j < k).collect(),
            EncodingSpec::Block { g, inner, .. } => {
                let cap = inner.capacity(*g);
                let (b, w) = (k / cap, k % cap + 1);
                let code = inner_code(*inner, w, *g);
                let mut bits = vec![false; n];
                bits[b * g..(b + 1) * g].copy_from_slice(&code);
                bits
            }
        })
    }
}

fn dense_bits(size: usize) -> usize {
    let mut d = 0;
    while (1usize << d) < size {
        d += 1;
    }
    d.max(1)
}

fn bits_to_int(bits: &[bool]) -> usize {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (usize::from(b) << i))
}

fn int_to_bits(k: usize, n: usize) -> Vec<bool> {
    (0..n).map(|i| k >> i & 1 == 1).collect()
}

pub fn gray_encode(k: usize) -> usize {
    k ^ (k >> 1)
}

pub fn gray_decode(code: usize) -> usize {
    let mut k = code;
    let mut shift = code >> 1;
    while shift != 0 {
        k ^= shift;
        shift >>= 1;
    }
    k
}

fn inner_code(inner: InnerKind, w: usize, g: usize) -> Vec<bool> {
    match inner {
        InnerKind::Binary => int_to_bits(w, g),
        InnerKind::Gray => int_to_bits(gray_encode(w), g),
        InnerKind::Unary => (0..g).map(|j| j < w).collect(),
    }
}

/// Boolean variable `x_i = (1 + s_i) / 2`.
fn bit(i: SpinIndex) -> SpinPolynomial {
    (SpinPolynomial::var(i) + 1.0) * 0.5
}

/// `∏ (1 ± s_i) / 2`, one for the given codeword and zero elsewhere.
fn codeword_indicator(spins: &[SpinIndex], code: &[bool]) -> SpinPolynomial {
    spins.iter().zip(code).fold(SpinPolynomial::constant(1.0), |acc, (&i, &b)| {
        let s = SpinPolynomial::var(i);
        let factor = if b { (s + 1.0) * 0.5 } else { (-s + 1.0) * 0.5 };
        &acc * &factor
    })
}

/// Integer represented by the bits under straight binary weighting.
fn binary_value(spins: &[SpinIndex]) -> SpinPolynomial {
    spins
        .iter()
        .enumerate()
        .map(|(i, &s)| bit(s) * (1u64 << i) as f64)
        .sum()
}

/// Integer represented by a Gray codeword: binary bit `i` is the XOR of the
/// code bits at positions `≥ i`, i.e. `½(1 − ∏_{j≥i} (−s_j))`.
fn gray_value(spins: &[SpinIndex]) -> SpinPolynomial {
    let n = spins.len();
    let mut out = SpinPolynomial::zero();
    for i in 0..n {
        let sign = if (n - i).is_multiple_of(2) { 1.0 } else { -1.0 };
        let prod = SpinPolynomial::term(spins[i..].iter().copied(), sign);
        out += ((-prod) + 1.0) * (0.5 * (1u64 << i) as f64);
    }
    out
}

/// Number of set bits among `spins`.
fn popcount(spins: &[SpinIndex]) -> SpinPolynomial {
    spins.iter().map(|&s| bit(s)).sum()
}

/// Lagrange basis polynomial in `u` that is 1 at `u = a` and 0 at other `0..=m`.
fn lagrange_indicator(u: &SpinPolynomial, a: usize, m: usize) -> SpinPolynomial {
    let mut out = SpinPolynomial::constant(1.0);
    for i in (0..=m).filter(|&i| i != a) {
        let factor = (u.clone() - i as f64) * (1.0 / (a as f64 - i as f64));
        out = &out * &factor;
    }
    out
}

/// Quadratic one-hot core `(1 − Σ x_i)²`.
pub fn one_hot_quadratic_core(spins: &[SpinIndex]) -> SpinPolynomial {
    (-popcount(spins) + 1.0).pow(2)
}

/// XOR-chain one-hot core `−XOR(x) + α Σ x_i + 1 − α`. The chain is 1 on
/// odd-weight states, so one-hot strings sit at 0 and everything else is
/// lifted by at least `min(α, 1 − α)`.
pub fn one_hot_xor_core(spins: &[SpinIndex], alpha: f64) -> Result<SpinPolynomial, EncodingError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(EncodingError::InvalidAlpha(alpha));
    }
    let n = spins.len();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let xor = (-SpinPolynomial::term(spins.iter().copied(), sign) + 1.0) * 0.5;
    Ok(-xor + popcount(spins) * alpha + (1.0 - alpha))
}

/// Domain-wall chain `−(−s₁ + Σ s_α s_{α+1} + s_{N−1})` with the fixed
/// boundary spins `s₀ = −1` and `s_N = +1`. It takes the value `2 − N`
/// exactly on single-wall states.
fn domain_wall_chain(spins: &[SpinIndex]) -> SpinPolynomial {
    let n = spins.len() + 1;
    let s = |alpha: usize| -> SpinPolynomial {
        if alpha == 0 {
            SpinPolynomial::constant(-1.0)
        } else if alpha == n {
            SpinPolynomial::constant(1.0)
        } else {
            SpinPolynomial::var(spins[alpha - 1])
        }
    };
    let chain: SpinPolynomial = (0..n).map(|a| &s(a) * &s(a + 1)).sum();
    -chain
}

/// Binds `v` to fresh spins starting at `*next`, advancing the allocator.
pub fn encode(
    v: &DiscreteVariable,
    spec: &EncodingSpec,
    next: &mut SpinIndex,
) -> Result<EncodedVariable, EncodingError> {
    let size = v.size();
    if let EncodingSpec::OneHotXorCore { alpha } = spec {
        if !(*alpha > 0.0 && *alpha < 1.0) {
            return Err(EncodingError::InvalidAlpha(*alpha));
        }
    }
    if let EncodingSpec::Block { blocks, g, inner } = spec {
        if *blocks == 0 || *g == 0 {
            return Err(EncodingError::EmptyBlock);
        }
        let capacity = blocks * inner.capacity(*g);
        if capacity < size {
            return Err(EncodingError::BlockTooSmall {
                id: v.id.clone(),
                blocks: *blocks,
                g: *g,
                capacity,
                size,
            });
        }
    }
    let n = spec.spin_count(size);
    let spins: Vec<SpinIndex> = (*next..*next + n).collect();
    *next += n;
    let lo = v.lo as f64;

    let (value_poly, indicators, core) = match spec {
        EncodingSpec::Binary | EncodingSpec::Gray => {
            let gray = matches!(spec, EncodingSpec::Gray);
            let value = if gray { gray_value(&spins) } else { binary_value(&spins) } + lo;
            let code = |k: usize| int_to_bits(if gray { gray_encode(k) } else { k }, n);
            let indicators = (0..size)
                .map(|k| (v.lo + k as i64, codeword_indicator(&spins, &code(k))))
                .collect();
            let unused: SpinPolynomial = (size..1 << n)
                .map(|k| codeword_indicator(&spins, &code(k)))
                .sum();
            let core = (size < 1 << n).then(|| Core::from_penalty(unused));
            (value, indicators, core)
        }
        EncodingSpec::OneHot | EncodingSpec::OneHotXorCore { .. } => {
            let value: SpinPolynomial = spins
                .iter()
                .enumerate()
                .map(|(k, &s)| bit(s) * k as f64)
                .sum::<SpinPolynomial>()
                + lo;
            let indicators = spins
                .iter()
                .enumerate()
                .map(|(k, &s)| (v.lo + k as i64, bit(s)))
                .collect();
            let penalty = match spec {
                EncodingSpec::OneHotXorCore { alpha } => one_hot_xor_core(&spins, *alpha)?,
                _ => one_hot_quadratic_core(&spins),
            };
            let core = Core {
                penalty,
                sum: popcount(&spins),
                target: 1.0,
            };
            (value, indicators, Some(core))
        }
        EncodingSpec::DomainWall => {
            let big_n = size;
            let s = |alpha: usize| -> SpinPolynomial {
                if alpha == 0 {
                    SpinPolynomial::constant(-1.0)
                } else if alpha == big_n {
                    SpinPolynomial::constant(1.0)
                } else {
                    SpinPolynomial::var(spins[alpha - 1])
                }
            };
            let total: SpinPolynomial = spins.iter().map(|&i| SpinPolynomial::var(i)).sum();
            let value = (-total + (1 + big_n) as f64) * 0.5 + (lo - 1.0);
            let indicators = (1..=big_n)
                .map(|a| (v.lo + a as i64 - 1, (s(a) - s(a - 1)) * 0.5))
                .collect();
            // With fewer than three values every register state is a single wall.
            let core = (big_n >= 3).then(|| {
                let chain = domain_wall_chain(&spins);
                let target = 2.0 - big_n as f64;
                Core {
                    penalty: chain.clone() - target,
                    sum: chain,
                    target,
                }
            });
            (value, indicators, core)
        }
        EncodingSpec::Unary => {
            if n > UNARY_WARN_SPINS {
                log::warn!(
                    "unary encoding of `{}` uses {n} spins; indicator polynomials grow combinatorially",
                    v.id
                );
            }
            let u = popcount(&spins);
            let indicators = (0..size)
                .map(|k| (v.lo + k as i64, lagrange_indicator(&u, k, n)))
                .collect();
            (u + lo, indicators, None)
        }
        EncodingSpec::Block { blocks, g, inner } => {
            let (blocks, g, inner) = (*blocks, *g, *inner);
            let cap = inner.capacity(g);
            let block_spins: Vec<&[SpinIndex]> = spins.chunks(g).collect();
            let active: Vec<SpinPolynomial> = block_spins
                .iter()
                .map(|bs| {
                    let empty = bs.iter().fold(SpinPolynomial::constant(1.0), |acc, &i| {
                        &acc * &((-SpinPolynomial::var(i) + 1.0) * 0.5)
                    });
                    -empty + 1.0
                })
                .collect();
            let inner_value = |bs: &[SpinIndex]| match inner {
                InnerKind::Binary => binary_value(bs),
                InnerKind::Gray => gray_value(bs),
                InnerKind::Unary => popcount(bs),
            };
            let inner_indicator = |bs: &[SpinIndex], w: usize| match inner {
                InnerKind::Unary => lagrange_indicator(&popcount(bs), w, g),
                _ => codeword_indicator(bs, &inner_code(inner, w, g)),
            };
            let mut value = SpinPolynomial::constant(lo);
            for b in 0..blocks {
                value += active[b].scale(b as f64 * cap as f64 - 1.0);
                value += inner_value(block_spins[b]);
            }
            let mut indicators = BTreeMap::new();
            let mut unused = SpinPolynomial::zero();
            for k in 0..blocks * cap {
                let ind = inner_indicator(block_spins[k / cap], k % cap + 1);
                if k < size {
                    indicators.insert(v.lo + k as i64, ind);
                } else {
                    unused += ind;
                }
            }
            // Σ_{b≠b'} t_b t_b' + (1 − Σ t_b) = (1 − Σ t_b)², zero iff one block is active.
            let mut penalty = unused;
            for b in 0..blocks {
                for c in 0..blocks {
                    if b != c {
                        penalty += &active[b] * &active[c];
                    }
                }
            }
            penalty += (-active.iter().cloned().sum::<SpinPolynomial>()) + 1.0;
            (value, indicators, Some(Core::from_penalty(penalty)))
        }
    };

    Ok(EncodedVariable {
        variable: v.clone(),
        spec: spec.clone(),
        spins,
        value_poly,
        indicators,
        core,
    })
}

/// Register-local argmin set of the core, or all states when there is no core.
pub fn core_ground_set(ev: &EncodedVariable) -> Result<Vec<Vec<bool>>, EncodingError> {
    let n = ev.num_spins();
    if n > MAX_ENUMERATED_REGISTER {
        return Err(EncodingError::RegisterTooLarge(n));
    }
    let states = (0u64..1 << n).map(|z| int_to_bits(z as usize, n));
    let Some(core) = &ev.core else {
        return Ok(states.collect());
    };
    let first = ev.spins.first().copied().unwrap_or(0);
    let local = core.penalty.relabel(|i| i - first);
    let table = local
        .energy_table(n)
        .map_err(|_| EncodingError::RegisterTooLarge(n))?;
    let min = table.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(states
        .zip(table)
        .filter(|(_, e)| *e <= min + 1e-9)
        .map(|(s, _)| s)
        .collect())
}

/// True iff `pattern` matches `id`, where `*` matches any run of characters.
pub fn glob_match(pattern: &str, id: &str) -> bool {
    let parts: Vec<&str> = pattern.split('*').collect();
    if parts.len() == 1 {
        return pattern == id;
    }
    let (first, last) = (parts[0], parts[parts.len() - 1]);
    if !id.starts_with(first) || id.len() < first.len() + last.len() || !id.ends_with(last) {
        return false;
    }
    let mut rest = &id[first.len()..id.len() - last.len()];
    for mid in &parts[1..parts.len() - 1] {
        match rest.find(mid) {
            Some(pos) => rest = &rest[pos + mid.len()..],
            None => return false,
        }
    }
    true
}

/// Default encoding plus per-variable overrides; later rules win.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodingPlan {
    pub default: EncodingSpec,
    /// Used for slack variables that no rule names.
    pub slack_default: EncodingSpec,
    pub rules: Vec<(String, EncodingSpec)>,
}

impl Default for EncodingPlan {
    fn default() -> Self {
        EncodingPlan::uniform(EncodingSpec::Binary)
    }
}

impl EncodingPlan {
    pub fn uniform(spec: EncodingSpec) -> Self {
        EncodingPlan {
            default: spec,
            slack_default: EncodingSpec::Binary,
            rules: Vec::new(),
        }
    }

    /// Adds an override for ids matching `pattern` (`*` wildcards allowed).
    pub fn with(mut self, pattern: impl Into<String>, spec: EncodingSpec) -> Self {
        self.rules.push((pattern.into(), spec));
        self
    }

    pub fn spec_for(&self, v: &DiscreteVariable) -> &EncodingSpec {
        self.rules
            .iter()
            .rev()
            .find(|(p, _)| glob_match(p, &v.id))
            .map(|(_, s)| s)
            .unwrap_or(if v.slack {
                &self.slack_default
            } else {
                &self.default
            })
    }

    /// Override patterns that match none of the given ids.
    pub fn unmatched_patterns<'a>(&self, ids: impl Iterator<Item = &'a str> + Clone) -> Vec<String> {
        self.rules
            .iter()
            .filter(|(p, _)| !ids.clone().any(|id| glob_match(p, id)))
            .map(|(p, _)| p.clone())
            .collect()
    }
}
