//! Finitely supported Laurent series over F_p.
//!
//! `F_p[t, t^-1]` is dense in `F_p((t))`, and every group and cocycle operation
//! in this crate maps finitely supported inputs to finitely supported outputs,
//! so all computation here is exact.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{Fp, Prime};

/// t-adic valuation; the zero element has valuation `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// An element `sum c_m t^m` of `F_p[t, t^-1]`. No stored coefficient is zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    p: Prime,
    terms: BTreeMap<i64, u32>,
}

impl LaurentPoly {
    pub fn zero(p: Prime) -> Self {
        LaurentPoly { p, terms: BTreeMap::new() }
    }

    /// `c t^m`; the zero element when `c` vanishes.
    pub fn monomial(c: Fp, m: i64) -> Self {
        let mut x = Self::zero(c.modulus());
        if !c.is_zero() {
            x.terms.insert(m, c.value());
        }
        x
    }

    /// `t^m` with coefficient 1.
    pub fn t_pow(p: Prime, m: i64) -> Self {
        Self::monomial(Fp::one(p), m)
    }

    /// Sums repeated exponents and drops zero coefficients.
    pub fn from_terms(p: Prime, terms: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut x = Self::zero(p);
        for (m, c) in terms {
            x.add_term(m, p.reduce(c));
        }
        x
    }

    pub fn modulus(&self) -> Prime {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `t^m` as a residue in `[0, p)`.
    pub fn coeff(&self, m: i64) -> u32 {
        self.terms.get(&m).copied().unwrap_or(0)
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.terms.keys().copied()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn valuation(&self) -> Valuation {
        match self.terms.keys().next() {
            Some(&m) => Valuation::Finite(m),
            None => Valuation::Infinite,
        }
    }

    /// Adds `c t^m` in place.
    pub fn add_term(&mut self, m: i64, c: u32) {
        let c = c % self.p.get();
        if c == 0 {
            return;
        }
        let p = self.p;
        let slot = self.terms.entry(m).or_insert(0);
        *slot = p.add(*slot, c);
        if *slot == 0 {
            self.terms.remove(&m);
        }
    }

    fn check(&self, other: &LaurentPoly) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p.get(), other.p.get()));
        }
        Ok(())
    }

    pub fn add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.add(&other.negate())
    }

    pub fn negate(&self) -> LaurentPoly {
        let p = self.p;
        LaurentPoly { p, terms: self.terms.iter().map(|(&m, &c)| (m, p.neg(c))).collect() }
    }

    pub fn scale(&self, c: u32) -> LaurentPoly {
        let p = self.p;
        let c = c % p.get();
        if c == 0 {
            return Self::zero(p);
        }
        LaurentPoly { p, terms: self.terms.iter().map(|(&m, &v)| (m, p.mul(v, c))).collect() }
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> LaurentPoly {
        LaurentPoly { p: self.p, terms: self.terms.iter().map(|(&m, &c)| (m + k, c)).collect() }
    }

    /// Restriction to the exponents satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(i64) -> bool) -> LaurentPoly {
        LaurentPoly { p: self.p, terms: self.terms.iter().filter(|(&m, _)| keep(m)).map(|(&m, &c)| (m, c)).collect() }
    }

    /// Parses `"c*t^m + ..."`. Terms may come in any order; `t^-1`, `t^{-1}`
    /// and `t^(-1)` are all accepted, as are subtraction and bare constants.
    pub fn parse(p: Prime, text: &str) -> Result<LaurentPoly> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty Laurent polynomial".into()));
        }
        let bytes = s.as_bytes();
        let mut out = Self::zero(p);
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = 1i64;
            if i > 0 || bytes[i] == b'+' || bytes[i] == b'-' {
                match bytes[i] {
                    b'+' => i += 1,
                    b'-' => {
                        sign = -1;
                        i += 1
                    }
                    _ => return Err(Error::Parse(format!("expected '+' or '-' at offset {i} in {text:?}"))),
                }
            }
            let start = i;
            while i < bytes.len() && (i == start || (bytes[i] != b'+' && bytes[i] != b'-') || exponent_sign(bytes, i)) {
                i += 1;
            }
            let (m, c) = parse_term(&s[start..i]).map_err(|e| Error::Parse(format!("{e} in {text:?}")))?;
            out.add_term(m, p.reduce(sign * c));
        }
        Ok(out)
    }
}

// A '-' belongs to the exponent when it follows '^', '^{' or '^('.
fn exponent_sign(bytes: &[u8], i: usize) -> bool {
    bytes[i] == b'-' && i > 0 && matches!(bytes[i - 1], b'^' | b'{' | b'(')
}

fn parse_term(term: &str) -> std::result::Result<(i64, i64), String> {
    if term.is_empty() {
        return Err("empty term".into());
    }
    let Some(tpos) = term.find('t') else {
        let c = term.parse::<i64>().map_err(|_| format!("bad constant {term:?}"))?;
        return Ok((0, c));
    };
    let coeff_part = term[..tpos].trim_end_matches('*');
    let c = if coeff_part.is_empty() {
        1
    } else {
        coeff_part.parse::<i64>().map_err(|_| format!("bad coefficient {coeff_part:?}"))?
    };
    let rest = &term[tpos + 1..];
    let m = if rest.is_empty() {
        1
    } else {
        let e = rest.strip_prefix('^').ok_or_else(|| format!("expected '^' after t in {term:?}"))?;
        let e = e
            .strip_prefix('{')
            .and_then(|e| e.strip_suffix('}'))
            .or_else(|| e.strip_prefix('(').and_then(|e| e.strip_suffix(')')))
            .unwrap_or(e);
        e.parse::<i64>().map_err(|_| format!("bad exponent {e:?}"))?
    };
    Ok((m, c))
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&m, &c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (c, m) {
                (c, 0) => write!(f, "{c}")?,
                (1, m) => write!(f, "t^{m}")?,
                (c, m) => write!(f, "{c}*t^{m}")?,
            }
        }
        Ok(())
    }
}
