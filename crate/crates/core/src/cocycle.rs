//! Bi-additive 2-cocycles and commutator maps on `A = F_p((t))`.
//!
//! Three cocycle families are supported:
//!
//! * `EtaS`: the cocycle
//!   `eta_s(x, y) = sum_{k in supp s} sum_i x_i y_{i+2k} t^{i+k}` for a
//!   `{0,1}`-valued sequence `s`.
//! * `MonomialGamma`: a cocycle whose commutator map is the monomial map
//!   `gamma(t^m, t^n) = sigma_{m-n} t^{m+n}`. The cocycle itself is the
//!   "lower triangular" lift `omega(t^m, t^n) = sigma_{m-n} t^{m+n}` for
//!   `m > n` and zero otherwise, which antisymmetrizes to `gamma` in every
//!   characteristic.
//! * `Table`: an explicit value table on all pairs of a finite window group
//!   `A_W`, used for mutation testing of the cocycle identity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::linalg::{Fp, Prime};
use crate::report::{CheckReport, ExponentWindow};

/// Eventually periodic odd sequence `sigma: Z -> F_p`.
///
/// Only `sigma_1, sigma_2, ...` are stored: `prefix` holds `sigma_1..sigma_L`
/// and `period` repeats for indices above `L`. The rules `sigma_0 = 0` and
/// `sigma_{-z} = -sigma_z` are applied on lookup.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSigma", into = "RawSigma")]
pub struct SigmaSeq {
    p: Prime,
    prefix: Vec<u32>,
    period: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct RawSigma {
    p: u32,
    #[serde(default)]
    prefix: Vec<i64>,
    period: Vec<i64>,
}

impl TryFrom<RawSigma> for SigmaSeq {
    type Error = Error;
    fn try_from(raw: RawSigma) -> Result<Self> {
        SigmaSeq::new(Prime::new(raw.p)?, &raw.prefix, &raw.period)
    }
}

impl From<SigmaSeq> for RawSigma {
    fn from(s: SigmaSeq) -> Self {
        RawSigma {
            p: s.p.get(),
            prefix: s.prefix.iter().map(|&v| v as i64).collect(),
            period: s.period.iter().map(|&v| v as i64).collect(),
        }
    }
}

impl SigmaSeq {
    pub fn new(p: Prime, prefix: &[i64], period: &[i64]) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        Ok(SigmaSeq {
            p,
            prefix: prefix.iter().map(|&v| p.reduce(v)).collect(),
            period: period.iter().map(|&v| p.reduce(v)).collect(),
        })
    }

    /// Like [`SigmaSeq::new`] but rejects entries outside `{0, 1}`.
    pub fn binary(p: Prime, prefix: &[i64], period: &[i64]) -> Result<Self> {
        if prefix.iter().chain(period).any(|&v| v != 0 && v != 1) {
            return Err(Error::NotBinary);
        }
        Self::new(p, prefix, period)
    }

    /// Indicator sequence of the single index `k >= 1`.
    pub fn indicator(p: Prime, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("indicator index must be positive".into()));
        }
        let mut prefix = vec![0; k];
        prefix[k - 1] = 1;
        Self::new(p, &prefix, &[0])
    }

    pub fn zero(p: Prime) -> Self {
        SigmaSeq { p, prefix: Vec::new(), period: vec![0] }
    }

    pub fn modulus(&self) -> Prime {
        self.p
    }

    pub fn prefix(&self) -> &[u32] {
        &self.prefix
    }

    pub fn period(&self) -> &[u32] {
        &self.period
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    pub fn is_binary(&self) -> bool {
        self.prefix.iter().chain(&self.period).all(|&v| v <= 1)
    }

    pub fn is_zero(&self) -> bool {
        self.prefix.iter().chain(&self.period).all(|&v| v == 0)
    }

    /// `sigma_z` as a residue.
    pub fn value(&self, z: i64) -> u32 {
        if z == 0 {
            return 0;
        }
        let n = z.unsigned_abs();
        let l = self.prefix.len() as u64;
        let v = if n <= l {
            self.prefix[(n - 1) as usize]
        } else {
            self.period[((n - l - 1) % self.period.len() as u64) as usize]
        };
        if z < 0 {
            self.p.neg(v)
        } else {
            v
        }
    }

    pub fn at(&self, z: i64) -> Fp {
        Fp::new(self.p, self.value(z) as i64)
    }

    /// Parses the token form `prefix=[1,0] period=[1]`, or a JSON object
    /// `{"p":2,"prefix":[..],"period":[..]}` (whose `p` must agree).
    pub fn parse(p: Prime, text: &str) -> Result<Self> {
        let text = text.trim();
        if text.starts_with('{') {
            let s: SigmaSeq = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
            if s.p != p {
                return Err(Error::ModulusMismatch(s.p.get(), p.get()));
            }
            return Ok(s);
        }
        let mut prefix = None;
        let mut period = None;
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let (key, after) =
                rest.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=[...] in {text:?}")))?;
            let after = after.strip_prefix('[').ok_or_else(|| Error::Parse(format!("expected '[' after {key}=")))?;
            let (body, tail) =
                after.split_once(']').ok_or_else(|| Error::Parse(format!("unterminated list for {key}")))?;
            let values = body
                .split(',')
                .filter(|v| !v.is_empty())
                .map(|v| v.parse::<i64>().map_err(|_| Error::Parse(format!("bad entry {v:?}"))))
                .collect::<Result<Vec<_>>>()?;
            match key {
                "prefix" => prefix = Some(values),
                "period" => period = Some(values),
                other => return Err(Error::Parse(format!("unknown key {other:?}"))),
            }
            rest = tail.trim_start_matches(',');
        }
        let period = period.ok_or_else(|| Error::Parse("missing period=[...]".into()))?;
        Self::new(p, &prefix.unwrap_or_default(), &period)
    }
}

impl std::fmt::Display for SigmaSeq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let join = |v: &[u32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "prefix=[{}] period=[{}]", join(&self.prefix), join(&self.period))
    }
}

fn require_binary(s: &SigmaSeq) -> Result<()> {
    if s.is_binary() {
        Ok(())
    } else {
        Err(Error::NotBinary)
    }
}

fn same_modulus(p: Prime, others: &[&LaurentPoly]) -> Result<()> {
    for x in others {
        if x.modulus() != p {
            return Err(Error::ModulusMismatch(p.get(), x.modulus().get()));
        }
    }
    Ok(())
}

/// `eta_s(x, y)`. Only pairs `(i, j)` with `i` in `supp x`, `j` in `supp y`
/// and `j - i = 2k`, `k > 0`, `s(k) = 1` contribute `x_i y_j t^{i+k}`.
pub fn eval_eta(s: &SigmaSeq, x: &LaurentPoly, y: &LaurentPoly) -> Result<LaurentPoly> {
    require_binary(s)?;
    let p = s.modulus();
    same_modulus(p, &[x, y])?;
    let mut out = LaurentPoly::zero(p);
    for (i, xi) in x.terms() {
        for (j, yj) in y.terms() {
            let diff = j - i;
            if diff > 0 && diff % 2 == 0 && s.value(diff / 2) == 1 {
                out.add_term(i + diff / 2, p.mul(xi, yj));
            }
        }
    }
    Ok(out)
}

/// Monomial commutator map `sum x_m y_n sigma_{m-n} t^{m+n}`.
pub fn gamma_monomial(sigma: &SigmaSeq, x: &LaurentPoly, y: &LaurentPoly) -> Result<LaurentPoly> {
    let p = sigma.modulus();
    same_modulus(p, &[x, y])?;
    let mut out = LaurentPoly::zero(p);
    for (m, xm) in x.terms() {
        for (n, yn) in y.terms() {
            let s = sigma.value(m - n);
            if s != 0 {
                out.add_term(m + n, p.mul(p.mul(xm, yn), s));
            }
        }
    }
    Ok(out)
}

/// Cocycle lifting `gamma_monomial`: only pairs with `m > n` contribute.
pub fn gamma_lift(sigma: &SigmaSeq, x: &LaurentPoly, y: &LaurentPoly) -> Result<LaurentPoly> {
    let p = sigma.modulus();
    same_modulus(p, &[x, y])?;
    let mut out = LaurentPoly::zero(p);
    for (m, xm) in x.terms() {
        for (n, yn) in y.terms().filter(|&(n, _)| n < m) {
            let s = sigma.value(m - n);
            if s != 0 {
                out.add_term(m + n, p.mul(p.mul(xm, yn), s));
            }
        }
    }
    Ok(out)
}

/// Closed form of `eta_s(t^a, t^b) - eta_s(t^b, t^a)`.
pub fn gw_commutator_closed_form(s: &SigmaSeq, a: i64, b: i64) -> Result<LaurentPoly> {
    require_binary(s)?;
    let p = s.modulus();
    if a == b || (a - b).rem_euclid(2) != 0 {
        return Ok(LaurentPoly::zero(p));
    }
    let mid = (a + b) / 2;
    let value = if a < b { s.value((b - a) / 2) } else { p.neg(s.value((a - b) / 2)) };
    Ok(LaurentPoly::monomial(Fp::new(p, value as i64), mid))
}

/// The sequence `sigma` of the even-exponent subgroup `G_0` of `A x_{eta_s} A`
/// after reindexing `t^n -> t^{2n}` and negating the center:
/// `sigma_z = s(z)` for `z > 0`, extended oddly.
pub fn g0_sigma(s: &SigmaSeq) -> Result<SigmaSeq> {
    require_binary(s)?;
    Ok(s.clone())
}

/// Value table of a map `A_W x A_W -> A` on the finite window group
/// `A_W = span{t^b : b in basis}`. Elements of `A_W` are indexed by their
/// coefficient vectors read as base-p numerals (first basis entry least
/// significant).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CocycleTable {
    p: Prime,
    basis: Vec<i64>,
    size: usize,
    values: Vec<LaurentPoly>,
}

impl CocycleTable {
    /// Upper bound on `|A_W|` so that the table stays small.
    pub const MAX_ELEMENTS: usize = 1 << 10;

    /// Tabulates `f` on all pairs of `A_W`.
    pub fn tabulate(
        p: Prime,
        basis: &[i64],
        mut f: impl FnMut(&LaurentPoly, &LaurentPoly) -> Result<LaurentPoly>,
    ) -> Result<Self> {
        let mut sorted = basis.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != basis.len() {
            return Err(Error::Invalid("basis exponents must be distinct".into()));
        }
        let size = (p.get() as usize).checked_pow(basis.len() as u32).filter(|&n| n <= Self::MAX_ELEMENTS).ok_or_else(
            || Error::Invalid(format!("window group too large for a table ({} generators)", basis.len())),
        )?;
        let mut table = CocycleTable { p, basis: basis.to_vec(), size, values: Vec::with_capacity(size * size) };
        let elems: Vec<LaurentPoly> = (0..size).map(|c| table.element(c)).collect();
        for x in &elems {
            for y in &elems {
                table.values.push(f(x, y)?);
            }
        }
        Ok(table)
    }

    /// Tabulates a bi-additive cocycle.
    pub fn from_spec(spec: &CocycleSpec, basis: &[i64]) -> Result<Self> {
        Self::tabulate(spec.modulus(), basis, |x, y| spec.eval(x, y))
    }

    pub fn modulus(&self) -> Prime {
        self.p
    }

    pub fn basis(&self) -> &[i64] {
        &self.basis
    }

    /// `|A_W|`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn element(&self, mut code: usize) -> LaurentPoly {
        let q = self.p.get() as usize;
        let mut x = LaurentPoly::zero(self.p);
        for &b in &self.basis {
            x.add_term(b, (code % q) as u32);
            code /= q;
        }
        x
    }

    pub fn code(&self, x: &LaurentPoly) -> Result<usize> {
        let q = self.p.get() as usize;
        let mut code = 0;
        let mut used = 0;
        for &b in self.basis.iter().rev() {
            let c = x.coeff(b);
            if c != 0 {
                used += 1;
            }
            code = code * q + c as usize;
        }
        if used != x.num_terms() {
            return Err(Error::OutsideWindow(x.to_string()));
        }
        Ok(code)
    }

    pub fn value(&self, u: usize, v: usize) -> &LaurentPoly {
        &self.values[u * self.size + v]
    }

    pub fn eval(&self, x: &LaurentPoly, y: &LaurentPoly) -> Result<LaurentPoly> {
        Ok(self.value(self.code(x)?, self.code(y)?).clone())
    }

    /// Index of the sum of two elements.
    pub fn add_codes(&self, mut u: usize, mut v: usize) -> usize {
        let q = self.p.get() as usize;
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.basis.len() {
            out += ((u % q + v % q) % q) * place;
            u /= q;
            v /= q;
            place *= q;
        }
        out
    }

    /// The cocycle identity at the index triple `(a, b, c)`.
    pub fn identity_holds(&self, a: usize, b: usize, c: usize) -> Result<bool> {
        let lhs = self.value(self.add_codes(a, b), c).add(self.value(a, b))?;
        let rhs = self.value(a, self.add_codes(b, c)).add(self.value(b, c))?;
        Ok(lhs == rhs)
    }

    /// First index triple (lexicographic) violating the cocycle identity.
    pub fn first_violation(&self) -> Result<Option<(usize, usize, usize)>> {
        let n = self.size;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if !self.identity_holds(a, b, c)? {
                        return Ok(Some((a, b, c)));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Adds `delta` to the single entry at `(u, v)`.
    pub fn perturb(&mut self, u: usize, v: usize, delta: &LaurentPoly) -> Result<()> {
        let slot = &mut self.values[u * self.size + v];
        *slot = slot.add(delta)?;
        Ok(())
    }
}

/// A 2-cocycle on `A` describing a central extension `A x_omega A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CocycleSpec {
    EtaS(SigmaSeq),
    MonomialGamma(SigmaSeq),
    Table(CocycleTable),
}

impl CocycleSpec {
    pub fn eta(s: SigmaSeq) -> Result<Self> {
        require_binary(&s)?;
        Ok(CocycleSpec::EtaS(s))
    }

    pub fn modulus(&self) -> Prime {
        match self {
            CocycleSpec::EtaS(s) | CocycleSpec::MonomialGamma(s) => s.modulus(),
            CocycleSpec::Table(t) => t.modulus(),
        }
    }

    /// `omega(x, y)`.
    pub fn eval(&self, x: &LaurentPoly, y: &LaurentPoly) -> Result<LaurentPoly> {
        match self {
            CocycleSpec::EtaS(s) => eval_eta(s, x, y),
            CocycleSpec::MonomialGamma(s) => gamma_lift(s, x, y),
            CocycleSpec::Table(t) => {
                same_modulus(t.modulus(), &[x, y])?;
                t.eval(x, y)
            }
        }
    }

    /// Commutator map `omega(x, y) - omega(y, x)`.
    pub fn commutator(&self, x: &LaurentPoly, y: &LaurentPoly) -> Result<LaurentPoly> {
        self.eval(x, y)?.sub(&self.eval(y, x)?)
    }

    /// `w` with `omega(tx, ty) = t^w omega(x, y)`, when such a weight exists.
    pub fn shift_weight(&self) -> Option<i64> {
        match self {
            CocycleSpec::EtaS(_) => Some(1),
            CocycleSpec::MonomialGamma(_) => Some(2),
            CocycleSpec::Table(_) => None,
        }
    }

    fn label(&self) -> String {
        match self {
            CocycleSpec::EtaS(s) => format!("eta_s[{s}]"),
            CocycleSpec::MonomialGamma(s) => format!("gamma[{s}]"),
            CocycleSpec::Table(t) => format!("table[basis={:?}]", t.basis()),
        }
    }
}

fn random_in_window(rng: &mut ChaCha8Rng, p: Prime, window: ExponentWindow, terms: usize) -> LaurentPoly {
    LaurentPoly::from_terms(
        p,
        (0..terms).map(|_| (rng.gen_range(window.lo..=window.hi), rng.gen_range(0..p.get()) as i64)),
    )
}

fn cocycle_identity_holds(omega: &CocycleSpec, a: &LaurentPoly, b: &LaurentPoly, c: &LaurentPoly) -> Result<bool> {
    let lhs = omega.eval(&a.add(b)?, c)?.add(&omega.eval(a, b)?)?;
    let rhs = omega.eval(a, &b.add(c)?)?.add(&omega.eval(b, c)?)?;
    Ok(lhs == rhs)
}

/// Checks `omega(a+b, c) + omega(a, b) = omega(a, b+c) + omega(b, c)`.
///
/// For `EtaS`/`MonomialGamma` every monomial triple in `window` is checked
/// and `samples` random non-monomial triples supported in the window are
/// added. For `Table` every triple of the table's window group is checked
/// and `window` is ignored.
pub fn verify_cocycle_identity(
    omega: &CocycleSpec,
    window: ExponentWindow,
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    let mut report = CheckReport::new(format!("cocycle identity for {}", omega.label()));
    let p = omega.modulus();
    if let CocycleSpec::Table(t) = omega {
        let n = t.size();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let ok = t.identity_holds(a, b, c)?;
                    report.record(ok, || {
                        format!(
                            "(a, b, c) = (#{a}, #{b}, #{c}) = ({}, {}, {})",
                            t.element(a),
                            t.element(b),
                            t.element(c)
                        )
                    });
                }
            }
        }
        return Ok(report);
    }
    let monos: Vec<LaurentPoly> = window.exponents().map(|m| LaurentPoly::t_pow(p, m)).collect();
    for a in &monos {
        for b in &monos {
            for c in &monos {
                let ok = cocycle_identity_holds(omega, a, b, c)?;
                report.record(ok, || format!("({a}, {b}, {c})"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let a = random_in_window(&mut rng, p, window, 4);
        let b = random_in_window(&mut rng, p, window, 4);
        let c = random_in_window(&mut rng, p, window, 4);
        let ok = cocycle_identity_holds(omega, &a, &b, &c)?;
        report.record(ok, || format!("({a}, {b}, {c})"));
    }
    Ok(report)
}

/// Checks `eta_s(tx, ty) = t eta_s(x, y)` on all monomial pairs of the window
/// and on `samples` random pairs.
pub fn verify_equivariance(s: &SigmaSeq, window: ExponentWindow, samples: usize, seed: u64) -> Result<CheckReport> {
    require_binary(s)?;
    let p = s.modulus();
    let mut report = CheckReport::new(format!("shift equivariance of eta_s[{s}]"));
    let check = |x: &LaurentPoly, y: &LaurentPoly, report: &mut CheckReport| -> Result<()> {
        let lhs = eval_eta(s, &x.shift(1), &y.shift(1))?;
        let rhs = eval_eta(s, x, y)?.shift(1);
        report.record(lhs == rhs, || format!("x = {x}, y = {y}"));
        Ok(())
    };
    for a in window.exponents() {
        for b in window.exponents() {
            check(&LaurentPoly::t_pow(p, a), &LaurentPoly::t_pow(p, b), &mut report)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x = random_in_window(&mut rng, p, window, 5);
        let y = random_in_window(&mut rng, p, window, 5);
        check(&x, &y, &mut report)?;
    }
    Ok(report)
}
