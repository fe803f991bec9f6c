//! Type I criteria for monomial commutation relations `gamma(t^m, t^n) = sigma_{m-n} t^{m+n}`.
//!
//! [`classify_sigma`] decides the symbolic criteria exactly. The remaining
//! operations produce finite-window evidence: for a character `chi` of `A`
//! with top exponent `k_0`, `K_0 = max(-1, k_0)`, the subspace
//! `O = {x : chi(gamma(x, t^m)) = 0 for all m > K_0}` is cut out on the window
//! `[i_0, K_0]` by a lower triangular system, and the rank of the alternating
//! form `B(x, y) = chi(gamma(x, y))` on it measures `O / L` at that scale.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cocycle::{g0_sigma, gamma_monomial, SigmaSeq};
use crate::error::{Error, Result};
use crate::extension::FiniteWindowGroup;
use crate::laurent::LaurentPoly;
use crate::linalg::{kernel_basis, radical_rank, rank, FpMatrix, Prime};

/// A continuous character `chi` of `A`, given by `a_m = chi(t^m)` on a finite support.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCharacter", into = "RawCharacter")]
pub struct CharacterSpec {
    p: Prime,
    coeffs: BTreeMap<i64, u32>,
}

#[derive(Serialize, Deserialize)]
struct RawCharacter {
    p: u32,
    #[serde(default)]
    coeffs: BTreeMap<i64, i64>,
}

impl TryFrom<RawCharacter> for CharacterSpec {
    type Error = Error;

    fn try_from(raw: RawCharacter) -> Result<Self> {
        Ok(CharacterSpec::new(Prime::new(raw.p)?, raw.coeffs))
    }
}

impl From<CharacterSpec> for RawCharacter {
    fn from(c: CharacterSpec) -> Self {
        RawCharacter { p: c.p.get(), coeffs: c.coeffs.into_iter().map(|(m, v)| (m, v as i64)).collect() }
    }
}

impl CharacterSpec {
    /// Values are reduced mod `p`; zero coefficients are dropped.
    pub fn new(p: Prime, coeffs: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut map = BTreeMap::new();
        for (m, v) in coeffs {
            let v = p.reduce(v);
            if v != 0 {
                map.insert(m, v);
            }
        }
        CharacterSpec { p, coeffs: map }
    }

    pub fn trivial(p: Prime) -> Self {
        CharacterSpec { p, coeffs: BTreeMap::new() }
    }

    /// `chi(t^m) = 1`, zero on every other monomial.
    pub fn delta(p: Prime, m: i64) -> Self {
        Self::new(p, [(m, 1)])
    }

    /// Reads `a_m` off the coefficients of a Laurent polynomial.
    pub fn from_poly(x: &LaurentPoly) -> Self {
        CharacterSpec { p: x.modulus(), coeffs: x.terms().collect() }
    }

    pub fn modulus(&self) -> Prime {
        self.p
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, u32> {
        &self.coeffs
    }

    pub fn is_trivial(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `a_m`.
    pub fn a(&self, m: i64) -> u32 {
        self.coeffs.get(&m).copied().unwrap_or(0)
    }

    /// Largest `m` with `a_m != 0`.
    pub fn k0(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// `max(-1, k_0)`; `-1` for the trivial character.
    pub fn big_k0(&self) -> i64 {
        self.k0().map_or(-1, |k| k.max(-1))
    }

    pub fn eval(&self, x: &LaurentPoly) -> u32 {
        let p = self.p;
        x.terms().fold(0, |acc, (m, c)| p.add(acc, p.mul(c, self.a(m))))
    }

    /// Accepts the JSON form or a Laurent polynomial such as `t^-7 + t^-13`.
    pub fn parse(p: Prime, text: &str) -> Result<Self> {
        let text = text.trim();
        if text.starts_with('{') {
            let c: CharacterSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
            if c.p != p {
                return Err(Error::ModulusMismatch(p.get(), c.p.get()));
            }
            return Ok(c);
        }
        Ok(Self::from_poly(&LaurentPoly::parse(p, text)?))
    }
}

impl fmt::Display for CharacterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let poly = LaurentPoly::from_terms(self.p, self.coeffs.iter().map(|(&m, &v)| (m, v as i64)));
        write!(f, "chi[{poly}]")
    }
}

/// One satisfied type I criterion with its threshold `c` and modulus `d`
/// (`d = 1` for criterion 1 and `d = 2` for criterion 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionHit {
    pub criterion: u8,
    pub c: u64,
    pub d: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum TypeIVerdict {
    /// `satisfied` lists every criterion that holds; `criterion`, `c` and `d`
    /// repeat the lowest-numbered one.
    TypeI {
        criterion: u8,
        c: u64,
        d: u64,
        satisfied: Vec<CriterionHit>,
    },
    /// `sigma` vanishes identically and the group is abelian.
    TypeIAbelian,
    NotTypeI {
        d: u64,
    },
    Unknown,
}

impl TypeIVerdict {
    pub fn is_type_i(&self) -> bool {
        matches!(self, TypeIVerdict::TypeI { .. } | TypeIVerdict::TypeIAbelian)
    }

    pub fn satisfies(&self, criterion: u8) -> Option<CriterionHit> {
        match self {
            TypeIVerdict::TypeI { satisfied, .. } => satisfied.iter().copied().find(|h| h.criterion == criterion),
            _ => None,
        }
    }
}

impl fmt::Display for TypeIVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeIVerdict::TypeI { criterion, c, d, satisfied } => {
                match criterion {
                    3 => write!(f, "TypeI(criterion 3, d = {d}, c = {c})")?,
                    _ => write!(f, "TypeI(criterion {criterion}, c = {c})")?,
                }
                let others: Vec<String> = satisfied
                    .iter()
                    .skip(1)
                    .map(|h| if h.criterion == 3 { format!("3 with d = {}", h.d) } else { h.criterion.to_string() })
                    .collect();
                if !others.is_empty() {
                    write!(f, " [also {}]", others.join(", "))?;
                }
                Ok(())
            }
            TypeIVerdict::TypeIAbelian => write!(f, "TypeI(abelian)"),
            TypeIVerdict::NotTypeI { d } => write!(f, "NotTypeI(d = {d})"),
            TypeIVerdict::Unknown => write!(f, "Unknown"),
        }
    }
}

/// Threshold `c` such that `sigma_z = 0` wherever `on(z)` fails and
/// `sigma_z != 0` wherever `on(z)` holds with `z > c`. Scanning `1..=horizon`
/// covers the prefix and a full joint period.
fn threshold(sigma: &SigmaSeq, horizon: u64, on: impl Fn(u64) -> bool) -> Option<u64> {
    let l = sigma.prefix_len() as u64;
    let mut c = 0;
    for z in 1..=horizon {
        let v = sigma.value(z as i64);
        if !on(z) {
            if v != 0 {
                return None;
            }
        } else if v == 0 {
            if z > l {
                return None;
            }
            c = z;
        }
    }
    Some(c)
}

/// Symbolic classification of the group with monomial commutation relations of type `sigma`.
pub fn classify_sigma(sigma: &SigmaSeq) -> TypeIVerdict {
    if sigma.is_zero() {
        return TypeIVerdict::TypeIAbelian;
    }
    let l = sigma.prefix_len() as u64;
    let per = sigma.period_len() as u64;
    let mut satisfied = Vec::new();
    if let Some(c) = threshold(sigma, l + per, |_| true) {
        satisfied.push(CriterionHit { criterion: 1, c, d: 1 });
    }
    if let Some(c) = threshold(sigma, l + 2 * per, |z| z % 2 == 1) {
        satisfied.push(CriterionHit { criterion: 2, c, d: 2 });
    }
    // A nonzero periodic tail supported on dZ forces d | period.
    for d in (1..=per).filter(|d| per.is_multiple_of(*d)) {
        if let Some(c) = threshold(sigma, l + per, |z| z % d == 0) {
            satisfied.push(CriterionHit { criterion: 3, c, d });
        }
    }
    if let Some(&first) = satisfied.first() {
        return TypeIVerdict::TypeI { criterion: first.criterion, c: first.c, d: first.d, satisfied };
    }
    // For d in the periodic tail, sigma_{d(1 + period)} = sigma_d, so only d <= L can witness.
    for d in 1..=l {
        if sigma.value(d as i64) == 0 {
            continue;
        }
        let limit = (l + d * per) / d + 1;
        if (2..=limit.max(2)).all(|n| sigma.value((d * n) as i64) == 0) {
            return TypeIVerdict::NotTypeI { d };
        }
    }
    TypeIVerdict::Unknown
}

/// Classifies `A x_{eta_s} A` through its even-exponent subgroup.
pub fn classify_s(s: &SigmaSeq) -> Result<TypeIVerdict> {
    Ok(classify_sigma(&g0_sigma(s)?))
}

fn same_prime(chi: &CharacterSpec, sigma: &SigmaSeq) -> Result<()> {
    if chi.modulus() != sigma.modulus() {
        return Err(Error::ModulusMismatch(sigma.modulus().get(), chi.modulus().get()));
    }
    Ok(())
}

fn window_width(chi: &CharacterSpec, i0: i64) -> Result<usize> {
    let big = chi.big_k0();
    if i0 > big {
        return Err(Error::WindowAboveK0 { i0, big_k0: big });
    }
    Ok((big - i0 + 1) as usize)
}

/// Lower triangular matrix of the membership system for `O` on the window
/// `[i_0, K_0]`: row `l` is the equation for `m = k_0 - i_0 - l`, column `n`
/// the coefficient of `t^{i_0 + n}`.
#[allow(non_snake_case)]
pub fn build_O_system(chi: &CharacterSpec, sigma: &SigmaSeq, i0: i64) -> Result<FpMatrix> {
    same_prime(chi, sigma)?;
    let k0 = chi.k0().ok_or(Error::TrivialCharacter)?;
    let width = window_width(chi, i0)?;
    let rows = (k0 - i0 - chi.big_k0()).max(0) as usize;
    let p = chi.modulus();
    Ok(FpMatrix::from_fn(p, rows, width, |l, n| {
        if n > l {
            return 0;
        }
        let (l, n) = (l as i64, n as i64);
        p.mul(sigma.value(2 * i0 + l - k0 + n), chi.a(k0 - l + n)) as i64
    }))
}

/// `chi(gamma(x, y))`.
pub fn pairing(chi: &CharacterSpec, sigma: &SigmaSeq, x: &LaurentPoly, y: &LaurentPoly) -> Result<u32> {
    same_prime(chi, sigma)?;
    Ok(chi.eval(&gamma_monomial(sigma, x, y)?))
}

fn vector_to_poly(p: Prime, i0: i64, v: &[u32]) -> LaurentPoly {
    LaurentPoly::from_terms(p, v.iter().enumerate().map(|(n, &c)| (i0 + n as i64, c as i64)))
}

/// Basis of `O` restricted to polynomials supported on `[i_0, K_0]`.
/// Every vector is checked against the defining equations before returning.
#[allow(non_snake_case)]
pub fn O_window_basis(chi: &CharacterSpec, sigma: &SigmaSeq, i0: i64) -> Result<Vec<LaurentPoly>> {
    let system = build_O_system(chi, sigma, i0)?;
    let p = chi.modulus();
    let basis: Vec<LaurentPoly> = kernel_basis(&system).iter().map(|v| vector_to_poly(p, i0, v)).collect();
    let (k0, big) = (chi.k0().unwrap_or(-1), chi.big_k0());
    for x in &basis {
        for m in (big + 1)..=(k0 - i0) {
            if pairing(chi, sigma, x, &LaurentPoly::t_pow(p, m))? != 0 {
                return Err(Error::Invalid(format!("{x} fails the membership equation for m = {m}")));
            }
        }
    }
    Ok(basis)
}

/// One window of a rank sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramRow {
    pub i_0: i64,
    #[serde(rename = "dim_O")]
    pub dim_o: usize,
    pub rank: usize,
    pub quotient_dim: usize,
    /// Number of witness blocks in the character, for witness sweeps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<usize>,
}

/// Rank of `B(x, y) = chi(gamma(x, y))` on `O` at window `[i_0, K_0]`.
pub fn gram_rank(chi: &CharacterSpec, sigma: &SigmaSeq, i0: i64) -> Result<GramRow> {
    same_prime(chi, sigma)?;
    if chi.is_trivial() {
        let dim_o = (-i0).max(0) as usize;
        return Ok(GramRow { i_0: i0, dim_o, rank: 0, quotient_dim: 0, blocks: None });
    }
    let p = chi.modulus();
    let width = window_width(chi, i0)?;
    let system = build_O_system(chi, sigma, i0)?;
    let kernel = kernel_basis(&system);
    let dim_o = kernel.len();
    let k = FpMatrix::from_fn(p, width, dim_o, |i, j| kernel[j][i] as i64);
    let form = FpMatrix::from_fn(p, width, width, |i, j| {
        let (i, j) = (i0 + i as i64, i0 + j as i64);
        p.mul(sigma.value(i - j), chi.a(i + j)) as i64
    });
    let b = k.transpose().matmul(&form)?.matmul(&k)?;
    let r = radical_rank(&b)?;
    Ok(GramRow { i_0: i0, dim_o, rank: r, quotient_dim: r, blocks: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Evidence {
    #[serde(rename = "BOUNDED-EVIDENCE")]
    Bounded,
    #[serde(rename = "GROWTH-EVIDENCE")]
    Growth,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl Evidence {
    /// Bounded when the last two ranks agree, growth when ranks strictly increase throughout.
    pub fn from_ranks(ranks: &[usize]) -> Self {
        match ranks {
            [.., a, b] if a == b => Evidence::Bounded,
            [_, _, ..] if ranks.windows(2).all(|w| w[0] < w[1]) => Evidence::Growth,
            _ => Evidence::Inconclusive,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Evidence::Bounded => "BOUNDED-EVIDENCE",
            Evidence::Growth => "GROWTH-EVIDENCE",
            Evidence::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessParams {
    pub d: u64,
    #[serde(rename = "M")]
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramReport {
    pub sigma: SigmaSeq,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub character: Option<CharacterSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessParams>,
    pub rows: Vec<GramRow>,
    pub verdict: Evidence,
}

impl GramReport {
    pub fn ranks(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.rank).collect()
    }

    /// Columns `i_0,dim_O,rank,quotient_dim`, then a `# verdict:` comment line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i_0,dim_O,rank,quotient_dim\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.i_0, r.dim_o, r.rank, r.quotient_dim));
        }
        out.push_str(&format!("# verdict: {}\n", self.verdict));
        out
    }
}

/// Default window schedule for rank sweeps.
pub const DEFAULT_SCHEDULE: [i64; 4] = [-4, -8, -16, -32];

pub fn validate_schedule(schedule: &[i64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::Invalid("window schedule is empty".into()));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Invalid("window schedule must be strictly decreasing in i_0".into()));
    }
    Ok(())
}

/// Rank sweep over a window schedule; windows run in parallel, rows stay in schedule order.
pub fn sweep(chi: &CharacterSpec, sigma: &SigmaSeq, schedule: &[i64]) -> Result<GramReport> {
    validate_schedule(schedule)?;
    let rows = schedule.par_iter().map(|&i0| gram_rank(chi, sigma, i0)).collect::<Result<Vec<_>>>()?;
    let verdict = Evidence::from_ranks(&rows.iter().map(|r| r.rank).collect::<Vec<_>>());
    Ok(GramReport { sigma: sigma.clone(), character: Some(chi.clone()), witness: None, rows, verdict })
}

/// Character supported on `{-d - 6nd : 1 <= n <= M}` with every coefficient `sigma_d^{-1}`,
/// so that `chi([t^{-3nd}, t^{-3nd-d}]) = 1` for each block `n`.
pub fn witness_character(d: u64, blocks: usize, sigma: &SigmaSeq) -> Result<CharacterSpec> {
    if d == 0 || blocks == 0 {
        return Err(Error::Invalid("witness needs d > 0 and M > 0".into()));
    }
    let p = sigma.modulus();
    let d = d as i64;
    let inv = p.inv(sigma.value(d)).ok_or(Error::VanishingSigma(d))?;
    Ok(CharacterSpec::new(p, (1..=blocks as i64).map(|n| (-d - 6 * n * d, inv as i64))))
}

/// The pair `(t^{-3nd}, t^{-3nd-d})` of the `n`th witness block.
pub fn witness_pair(p: Prime, d: u64, n: usize) -> (LaurentPoly, LaurentPoly) {
    let (d, n) = (d as i64, n as i64);
    (LaurentPoly::t_pow(p, -3 * n * d), LaurentPoly::t_pow(p, -3 * n * d - d))
}

/// Number of witness blocks whose pairs lie inside `[i_0, -1]`.
pub fn blocks_in_window(d: u64, i0: i64) -> usize {
    let d = d as i64;
    if i0 > -d * 4 {
        0
    } else {
        ((-i0 - d) / (3 * d)) as usize
    }
}

/// Witness sweep: row `j` (1-based) uses the witness character with
/// `min(j, M)` blocks, capped at what fits inside the window.
pub fn witness_sweep(d: u64, blocks: usize, sigma: &SigmaSeq, schedule: &[i64]) -> Result<GramReport> {
    validate_schedule(schedule)?;
    witness_character(d, 1, sigma)?;
    let rows = schedule
        .par_iter()
        .enumerate()
        .map(|(j, &i0)| {
            let n = (j + 1).min(blocks).min(blocks_in_window(d, i0));
            let mut row = if n == 0 {
                gram_rank(&CharacterSpec::trivial(sigma.modulus()), sigma, i0)?
            } else {
                gram_rank(&witness_character(d, n, sigma)?, sigma, i0)?
            };
            row.blocks = Some(n);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let verdict = Evidence::from_ranks(&rows.iter().map(|r| r.rank).collect::<Vec<_>>());
    Ok(GramReport {
        sigma: sigma.clone(),
        character: None,
        witness: Some(WitnessParams { d, m: blocks }),
        rows,
        verdict,
    })
}

/// `log_p [Q : Z(Q)]`, the rank of the antisymmetrized pairing of `Q`.
pub fn center_index_exponent(q: &FiniteWindowGroup) -> usize {
    let c = q.pairing();
    let p = q.modulus();
    let omega = FpMatrix::from_fn(p, c.rows(), c.cols(), |i, j| p.sub(c.get(i, j), c.get(j, i)) as i64);
    rank(&omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::CocycleSpec;
    use crate::group::CentralExtElement;
    use crate::linalg::kernel_basis;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn p(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    fn bin(prefix: &[i64], period: &[i64]) -> SigmaSeq {
        SigmaSeq::binary(p(2), prefix, period).unwrap()
    }

    #[test]
    fn character_basics() {
        let chi: CharacterSpec = serde_json::from_str(r#"{"p":2,"coeffs":{"-7":1,"-13":3}}"#).unwrap();
        assert_eq!(chi.k0(), Some(-7));
        assert_eq!(chi.big_k0(), -1);
        assert_eq!(chi.a(-13), 1);
        assert_eq!(serde_json::to_string(&chi).unwrap(), r#"{"p":2,"coeffs":{"-13":1,"-7":1}}"#);
        assert_eq!(CharacterSpec::parse(p(2), "t^-7 + t^-13").unwrap(), chi);
        assert_eq!(CharacterSpec::delta(p(3), 4).big_k0(), 4);
        assert!(CharacterSpec::new(p(3), [(1, 3)]).is_trivial());
        assert!(serde_json::from_str::<CharacterSpec>(r#"{"p":6,"coeffs":{}}"#).is_err());
    }

    #[test]
    fn classify_examples() {
        let v = classify_sigma(&bin(&[], &[1]));
        assert_eq!((v.satisfies(1).unwrap().c, v.to_string().starts_with("TypeI(criterion 1, c = 0)")), (0, true));
        assert_eq!(classify_sigma(&bin(&[1], &[0])), TypeIVerdict::NotTypeI { d: 1 });
        assert_eq!(classify_sigma(&bin(&[], &[0])), TypeIVerdict::TypeIAbelian);
        assert_eq!(classify_sigma(&bin(&[0, 1, 0], &[1])).satisfies(1).unwrap().c, 3);
        let odd = classify_sigma(&bin(&[0, 0, 0], &[0, 1]));
        assert_eq!(odd.satisfies(2).unwrap().c, 3);
        assert!(odd.satisfies(1).is_none());
        let three = classify_sigma(&bin(&[], &[0, 0, 1]));
        assert_eq!(three.satisfies(3), Some(CriterionHit { criterion: 3, c: 0, d: 3 }));
        assert_eq!(three.to_string(), "TypeI(criterion 3, d = 3, c = 0)");
        assert_eq!(classify_sigma(&bin(&[1, 1, 1], &[0])), TypeIVerdict::NotTypeI { d: 2 });
        assert_eq!(classify_sigma(&bin(&[1, 0, 0, 0, 0, 1], &[0])), TypeIVerdict::NotTypeI { d: 6 });
        // Tail vanishes exactly on 3Z and there is no prefix to host a witness.
        assert_eq!(classify_sigma(&bin(&[], &[1, 1, 0])), TypeIVerdict::Unknown);
    }

    #[test]
    fn classify_s_examples() {
        assert!(classify_s(&bin(&[], &[1, 0])).unwrap().satisfies(2).is_some());
        assert_eq!(classify_s(&bin(&[1, 1], &[1, 0])).unwrap(), TypeIVerdict::NotTypeI { d: 2 });
        for d in 1..=6usize {
            let mut prefix = vec![0; d];
            prefix[d - 1] = 1;
            assert_eq!(classify_s(&bin(&prefix, &[0])).unwrap(), TypeIVerdict::NotTypeI { d: d as u64 });
        }
        assert!(classify_s(&SigmaSeq::new(p(3), &[2], &[1]).unwrap()).is_err());
    }

    /// Brute force over a long horizon: criterion-style predicates on σ_1..σ_H.
    fn brute_force(sigma: &SigmaSeq, horizon: i64) -> (Vec<u8>, Option<u64>) {
        let l = sigma.prefix_len() as i64;
        let tail_ok = |on: &dyn Fn(i64) -> bool| {
            (1..=horizon).all(|z| if !on(z) { sigma.value(z) == 0 } else { z <= l || sigma.value(z) != 0 })
        };
        let mut hits = Vec::new();
        if tail_ok(&|_| true) {
            hits.push(1);
        }
        if tail_ok(&|z| z % 2 == 1) {
            hits.push(2);
        }
        // Criterion 3 moduli are recorded as 10 + d.
        for d in 1..=12 {
            if tail_ok(&|z| z % d == 0) {
                hits.push(10 + d as u8);
            }
        }
        let not_type_i =
            (1..=horizon / 8).find(|&d| sigma.value(d) != 0 && (2..=horizon / d).all(|n| sigma.value(d * n) == 0));
        (hits, not_type_i.map(|d| d as u64))
    }

    #[test]
    fn classifier_agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..2000 {
            let q = if rng.gen_bool(0.5) { p(2) } else { p(3) };
            let prefix: Vec<i64> = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(0..q.get() as i64)).collect();
            let period: Vec<i64> = (0..rng.gen_range(1..5)).map(|_| rng.gen_range(0..q.get() as i64)).collect();
            let sigma = SigmaSeq::new(q, &prefix, &period).unwrap();
            let (hits, witness) = brute_force(&sigma, 400);
            let verdict = classify_sigma(&sigma);
            for crit in [1u8, 2] {
                let expected = hits.contains(&crit) && !sigma.is_zero();
                assert_eq!(verdict.satisfies(crit).is_some(), expected, "{sigma} criterion {crit}: {verdict}");
            }
            if let TypeIVerdict::TypeI { satisfied, .. } = &verdict {
                let mut threes: Vec<u8> =
                    satisfied.iter().filter(|h| h.criterion == 3).map(|h| 10 + h.d as u8).collect();
                threes.sort();
                assert_eq!(threes, hits.iter().copied().filter(|&h| h > 10).collect::<Vec<_>>(), "{sigma}");
            } else if !sigma.is_zero() {
                assert!(hits.is_empty(), "{sigma}: {verdict}");
            }
            match verdict {
                TypeIVerdict::NotTypeI { d } => assert_eq!(Some(d), witness, "{sigma}"),
                TypeIVerdict::Unknown => assert!(witness.is_none(), "{sigma}"),
                _ => assert!(witness.is_none(), "{sigma} is both {verdict} and not type I"),
            }
        }
    }

    #[test]
    fn o_system_shape_and_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..300 {
            let q = if rng.gen_bool(0.5) { p(2) } else { p(3) };
            let sigma =
                SigmaSeq::new(q, &[rng.gen_range(0..3), rng.gen_range(0..3)], &[1, rng.gen_range(0..3)]).unwrap();
            let chi = CharacterSpec::new(q, (0..4).map(|_| (rng.gen_range(-8..=6), rng.gen_range(1..3))));
            if chi.is_trivial() {
                continue;
            }
            let k0 = chi.k0().unwrap();
            let i0 = chi.big_k0() - rng.gen_range(0..14);
            let m = build_O_system(&chi, &sigma, i0).unwrap();
            assert_eq!(m.rows() as i64, (k0 - i0 - chi.big_k0()).max(0));
            assert_eq!(m.cols() as i64, chi.big_k0() - i0 + 1);
            for l in 0..m.rows() {
                for n in l + 1..m.cols() {
                    assert_eq!(m.get(l, n), 0);
                }
                let diag = q.mul(sigma.value(2 * i0 - k0 + 2 * l as i64), chi.a(k0));
                assert_eq!(m.get(l, l), diag);
            }
            // Each kernel vector solves the untruncated equations directly.
            for v in kernel_basis(&m) {
                for mm in (chi.big_k0() + 1)..=(k0 - i0 + 3) {
                    let sum = v.iter().enumerate().fold(0, |acc, (n, &x)| {
                        let i = i0 + n as i64;
                        q.add(acc, q.mul(q.mul(sigma.value(i - mm), chi.a(i + mm)), x))
                    });
                    assert_eq!(sum, 0);
                }
            }
        }
    }

    #[test]
    fn o_system_errors_and_empty_case() {
        let sigma = bin(&[1], &[0]);
        assert_eq!(build_O_system(&CharacterSpec::trivial(p(2)), &sigma, -3), Err(Error::TrivialCharacter));
        let chi = CharacterSpec::delta(p(2), -7);
        assert!(matches!(build_O_system(&chi, &sigma, 0), Err(Error::WindowAboveK0 { .. })));
        // k_0 - K_0 - 1 < i_0: no equations, the whole window lies in O.
        let m = build_O_system(&chi, &sigma, -5).unwrap();
        assert_eq!((m.rows(), m.cols()), (0, 5));
        assert_eq!(O_window_basis(&chi, &sigma, -5).unwrap().len(), 5);
    }

    /// Exhaustive oracle: enumerate all window vectors and count those in O.
    #[test]
    fn o_basis_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..60 {
            let q = if rng.gen_bool(0.6) { p(2) } else { p(3) };
            let sigma =
                SigmaSeq::new(q, &[rng.gen_range(0..3), rng.gen_range(0..3)], &[rng.gen_range(0..3), 1]).unwrap();
            let chi = CharacterSpec::new(q, (0..3).map(|_| (rng.gen_range(-6..=1), 1)));
            if chi.is_trivial() {
                continue;
            }
            let big = chi.big_k0();
            let width = if q.get() == 2 { 9 } else { 6 };
            let i0 = big - width + 1;
            let basis = O_window_basis(&chi, &sigma, i0).unwrap();
            let k0 = chi.k0().unwrap();
            let total = (q.get() as u64).pow(width as u32);
            let mut count = 0u64;
            for code in 0..total {
                let mut c = code;
                let x = LaurentPoly::from_terms(
                    q,
                    (0..width).map(|n| {
                        let v = c % q.get() as u64;
                        c /= q.get() as u64;
                        (i0 + n, v as i64)
                    }),
                );
                if ((big + 1)..=(k0 - i0)).all(|m| pairing(&chi, &sigma, &x, &LaurentPoly::t_pow(q, m)).unwrap() == 0) {
                    count += 1;
                }
            }
            assert_eq!(count, (q.get() as u64).pow(basis.len() as u32));
        }
    }

    #[test]
    fn gram_examples() {
        let zero = SigmaSeq::zero(p(2));
        let chi = CharacterSpec::delta(p(2), 0);
        for i0 in [-4, -8, -16] {
            assert_eq!(gram_rank(&chi, &zero, i0).unwrap().rank, 0);
            assert_eq!(gram_rank(&chi, &zero, i0).unwrap().dim_o, (1 - i0) as usize);
        }
        let ones = bin(&[], &[1]);
        assert_eq!(gram_rank(&chi, &ones, -8).unwrap().rank, gram_rank(&chi, &ones, -16).unwrap().rank);
        let triv = gram_rank(&CharacterSpec::trivial(p(2)), &ones, -6).unwrap();
        assert_eq!((triv.rank, triv.dim_o), (0, 6));
    }

    /// The same form assembled from literal group commutators in `A x_gamma A`.
    fn literal_rank(chi: &CharacterSpec, sigma: &SigmaSeq, i0: i64) -> usize {
        let q = chi.modulus();
        let omega = Arc::new(CocycleSpec::MonomialGamma(sigma.clone()));
        let basis = O_window_basis(chi, sigma, i0).unwrap();
        let lifts: Vec<_> =
            basis.iter().map(|x| CentralExtElement::lift(Arc::clone(&omega), x.clone()).unwrap()).collect();
        let b = FpMatrix::from_fn(q, lifts.len(), lifts.len(), |i, j| {
            let c = lifts[i].literal_commutator(&lifts[j]).unwrap();
            assert!(c.x().is_zero());
            chi.eval(c.a()) as i64
        });
        rank(&b)
    }

    #[test]
    fn gram_rank_matches_literal_commutators() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..40 {
            let q = if rng.gen_bool(0.5) { p(2) } else { p(3) };
            let sigma =
                SigmaSeq::new(q, &[rng.gen_range(0..3), rng.gen_range(0..3)], &[rng.gen_range(0..3), 1]).unwrap();
            let chi = CharacterSpec::new(q, (0..4).map(|_| (rng.gen_range(-10..=4), rng.gen_range(1..3))));
            if chi.is_trivial() {
                continue;
            }
            let i0 = chi.big_k0() - rng.gen_range(3..12);
            assert_eq!(gram_rank(&chi, &sigma, i0).unwrap().rank, literal_rank(&chi, &sigma, i0));
        }
    }

    #[test]
    fn ranks_are_even_and_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..40 {
            let q = if rng.gen_bool(0.5) { p(2) } else { p(3) };
            let sigma = SigmaSeq::new(q, &[rng.gen_range(0..3)], &[rng.gen_range(0..3), 1]).unwrap();
            let chi = CharacterSpec::new(q, (0..4).map(|_| (rng.gen_range(-10..=4), 1)));
            if chi.is_trivial() {
                continue;
            }
            let top = chi.big_k0();
            let ranks: Vec<usize> = (1..6).map(|k| gram_rank(&chi, &sigma, top - 4 * k).unwrap().rank).collect();
            assert!(ranks.windows(2).all(|w| w[0] <= w[1]), "{ranks:?}");
            assert!(ranks.iter().all(|r| r % 2 == 0));
        }
    }

    #[test]
    fn type_i_verdicts_stabilize() {
        let families = [
            SigmaSeq::binary(p(2), &[], &[1]).unwrap(),
            SigmaSeq::binary(p(2), &[0, 1], &[1]).unwrap(),
            SigmaSeq::binary(p(2), &[], &[1, 0]).unwrap(),
            SigmaSeq::binary(p(2), &[], &[0, 0, 1]).unwrap(),
            SigmaSeq::new(p(3), &[2], &[1, 2]).unwrap(),
            SigmaSeq::new(p(3), &[0, 1, 0], &[2, 0]).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for sigma in &families {
            assert!(classify_sigma(sigma).is_type_i());
            let q = sigma.modulus();
            for _ in 0..25 {
                let chi = CharacterSpec::new(q, (0..4).map(|_| (rng.gen_range(-12..=12), rng.gen_range(1..3))));
                if chi.is_trivial() {
                    continue;
                }
                let a = gram_rank(&chi, sigma, -24).unwrap().rank;
                let b = gram_rank(&chi, sigma, -48).unwrap().rank;
                assert_eq!(a, b, "{sigma} {chi}");
            }
        }
    }

    /// A character reaching up to t^12 needs the window to start below -12
    /// before the rank settles.
    #[test]
    fn stabilization_depth_depends_on_the_support() {
        let chi = CharacterSpec::new(p(2), [(-1, 1), (10, 1), (12, 1)]);
        let sigma = bin(&[], &[1, 0]);
        let ranks: Vec<usize> =
            [-12, -24, -48, -96].iter().map(|&i0| gram_rank(&chi, &sigma, i0).unwrap().rank).collect();
        assert_eq!(ranks, vec![24, 26, 26, 26]);
    }

    #[test]
    fn witness_character_examples() {
        let delta = bin(&[1], &[0]);
        let chi = witness_character(1, 1, &delta).unwrap();
        assert_eq!(chi.coeffs().iter().map(|(&m, &v)| (m, v)).collect::<Vec<_>>(), vec![(-7, 1)]);
        assert_eq!(witness_character(2, 1, &delta), Err(Error::VanishingSigma(2)));
        let sigma = SigmaSeq::new(p(3), &[0, 2, 1, 0], &[0]).unwrap();
        let chi = witness_character(2, 4, &sigma).unwrap();
        assert!(chi.coeffs().values().all(|&v| v == 2));
        for n in 1..=4 {
            let (g, _) = witness_pair(p(3), 2, n);
            for m in 1..=4 {
                let (_, h) = witness_pair(p(3), 2, m);
                let v = pairing(&chi, &sigma, &g, &h).unwrap();
                assert_eq!(v != 0, n == m, "n = {n}, m = {m}");
                if n == m {
                    assert_eq!(v, 1);
                }
            }
        }
    }

    #[test]
    fn witness_pairs_lie_in_o_and_ranks_grow() {
        let delta = bin(&[1], &[0]);
        for m in 1..=5usize {
            let chi = witness_character(1, m, &delta).unwrap();
            let i0 = -3 * m as i64 - 1;
            let basis = O_window_basis(&chi, &delta, i0).unwrap();
            let row = gram_rank(&chi, &delta, i0).unwrap();
            assert_eq!(row.rank, 2 * m);
            let q = p(2);
            let width = (chi.big_k0() - i0 + 1) as usize;
            let span = FpMatrix::from_fn(q, basis.len(), width, |r, c| basis[r].coeff(i0 + c as i64) as i64);
            for n in 1..=m {
                let (g, h) = witness_pair(q, 1, n);
                for x in [g, h] {
                    let mut rows = span
                        .to_rows()
                        .into_iter()
                        .map(|r| r.into_iter().map(i64::from).collect())
                        .collect::<Vec<Vec<i64>>>();
                    rows.push((0..width).map(|c| x.coeff(i0 + c as i64) as i64).collect());
                    assert_eq!(rank(&FpMatrix::from_rows(q, &rows).unwrap()), basis.len());
                }
            }
        }
    }

    #[test]
    fn u_pairs_trivially_with_itself() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..50 {
            let q = if rng.gen_bool(0.5) { p(2) } else { p(3) };
            let sigma = SigmaSeq::new(q, &[1, 2], &[1]).unwrap();
            let chi = CharacterSpec::new(q, (0..3).map(|_| (rng.gen_range(-8..=8), 1)));
            let start = chi.big_k0() + 1;
            for a in start..start + 8 {
                for b in start..start + 8 {
                    let v = pairing(&chi, &sigma, &LaurentPoly::t_pow(q, a), &LaurentPoly::t_pow(q, b)).unwrap();
                    assert_eq!(v, 0);
                }
            }
        }
    }

    #[test]
    fn sweeps_and_evidence() {
        assert_eq!(Evidence::from_ranks(&[2, 4, 4]), Evidence::Bounded);
        assert_eq!(Evidence::from_ranks(&[2, 4, 6]), Evidence::Growth);
        assert_eq!(Evidence::from_ranks(&[2, 2, 4]), Evidence::Inconclusive);
        assert_eq!(Evidence::from_ranks(&[2]), Evidence::Inconclusive);
        let ones = bin(&[], &[1]);
        let report = sweep(&CharacterSpec::delta(p(2), 0), &ones, &DEFAULT_SCHEDULE).unwrap();
        assert_eq!(report.verdict, Evidence::Bounded);
        assert_eq!(report.rows.iter().map(|r| r.i_0).collect::<Vec<_>>(), DEFAULT_SCHEDULE);
        assert!(report.to_csv().starts_with("i_0,dim_O,rank,quotient_dim\n-4,"));
        assert!(report.to_csv().ends_with("# verdict: BOUNDED-EVIDENCE\n"));
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["verdict"], "BOUNDED-EVIDENCE");
        assert!(json["rows"][0].get("dim_O").is_some());
        assert!(sweep(&CharacterSpec::delta(p(2), 0), &ones, &[]).is_err());
        assert!(sweep(&CharacterSpec::delta(p(2), 0), &ones, &[-8, -4]).is_err());

        let delta = bin(&[1], &[0]);
        let w = witness_sweep(1, 4, &delta, &DEFAULT_SCHEDULE).unwrap();
        assert_eq!(w.ranks(), vec![2, 4, 6, 8]);
        assert_eq!(w.verdict, Evidence::Growth);
    }

    #[test]
    fn center_index_of_blocks() {
        let q = p(2);
        let abelian = FiniteWindowGroup::from_pairing(q, vec![0, 1], FpMatrix::zeros(q, 2, 2)).unwrap();
        assert_eq!(center_index_exponent(&abelian), 0);
        for n in 1..=4 {
            let g = FiniteWindowGroup::heisenberg_blocks(p(3), n).unwrap();
            assert_eq!(center_index_exponent(&g), 2 * n);
        }
    }
}
