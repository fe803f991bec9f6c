//! Finite fields `F_q`, `q = p^e`, with exp/log tables.
//!
//! Elements are coded as integers in `0..q` whose base-p digits are the
//! coefficients of the polynomial representative (constant term first).

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{FpMatrix, Prime};

#[derive(Clone, PartialEq, Eq)]
pub struct Gf {
    p: Prime,
    e: u32,
    q: u32,
    /// Monic defining polynomial, lowest coefficient first, length `e + 1`.
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.p, self.e, self.modulus)
    }
}

impl Gf {
    /// Largest supported field order.
    pub const MAX_ORDER: u32 = 1 << 16;

    /// Builds `F_{p^e}` from the first primitive monic polynomial of degree `e`.
    pub fn new(p: Prime, e: u32) -> Result<Self> {
        let q = (p.get() as u64)
            .checked_pow(e)
            .filter(|&q| e > 0 && q <= Self::MAX_ORDER as u64)
            .ok_or_else(|| Error::Invalid(format!("field order {p}^{e} is out of range")))? as u32;
        let pe = p.get();
        for tail in 0..q {
            let mut modulus: Vec<u32> = (0..e)
                .scan(tail, |t, _| {
                    let d = *t % pe;
                    *t /= pe;
                    Some(d)
                })
                .collect();
            modulus.push(1);
            if modulus[0] == 0 {
                continue;
            }
            if let Some(exp) = powers_of_x(p, &modulus, q) {
                let mut log = vec![0; q as usize];
                for (k, &v) in exp.iter().enumerate() {
                    log[v as usize] = k as u32;
                }
                return Ok(Gf { p, e, q, modulus, exp, log });
            }
        }
        Err(Error::Invalid(format!("no primitive polynomial found for {p}^{e}")))
    }

    /// Parses an order `q = p^e`.
    pub fn with_order(q: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::Invalid(format!("{q} is not a prime power")));
        }
        let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap_or(q);
        let mut e = 0;
        let mut rest = q;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        if rest != 1 {
            return Err(Error::Invalid(format!("{q} is not a prime power")));
        }
        Self::new(Prime::new(p)?, e)
    }

    pub fn characteristic(&self) -> Prime {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }

    pub fn digits(&self, a: u32) -> Vec<u32> {
        let pe = self.p.get();
        (0..self.e)
            .scan(a, |t, _| {
                let d = *t % pe;
                *t /= pe;
                Some(d)
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p.get() + self.p.reduce(d as i64))
    }

    /// The element `n * 1` of the prime field.
    pub fn from_int(&self, n: i64) -> u32 {
        self.p.reduce(n)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let pe = self.p.get();
        if self.e == 1 {
            return self.p.add(a, b);
        }
        if pe == 2 {
            return a ^ b;
        }
        let (mut a, mut b, mut place, mut out) = (a, b, 1, 0);
        while a > 0 || b > 0 {
            out += (a % pe + b % pe) % pe * place;
            a /= pe;
            b /= pe;
            place *= pe;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        let pe = self.p.get();
        if pe == 2 {
            return a;
        }
        if self.e == 1 {
            return self.p.neg(a);
        }
        let (mut a, mut place, mut out) = (a, 1, 0);
        while a > 0 {
            out += (pe - a % pe) % pe * place;
            a /= pe;
            place *= pe;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let k = (self.log[a as usize] + self.log[b as usize]) % (self.q - 1);
        self.exp[k as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let k = (self.q - 1 - self.log[a as usize]) % (self.q - 1);
        Some(self.exp[k as usize])
    }

    pub fn pow(&self, a: u32, n: u64) -> u32 {
        if n == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let k = (self.log[a as usize] as u64 * n) % (self.q as u64 - 1);
        self.exp[k as usize]
    }

    /// `a -> a^p`.
    pub fn frobenius(&self, a: u32) -> u32 {
        self.pow(a, self.p.get() as u64)
    }

    /// A generator of the multiplicative group.
    pub fn primitive(&self) -> u32 {
        self.exp[1 % (self.q as usize - 1).max(1)]
    }

    /// A generator of the multiplicative group of the subfield of order `p^f`.
    pub fn subfield_generator(&self, f: u32) -> Result<u32> {
        if f == 0 || !self.e.is_multiple_of(f) {
            return Err(Error::Invalid(format!("no subfield of degree {f} in GF({}^{})", self.p, self.e)));
        }
        let sub = self.p.get().pow(f);
        Ok(self.pow(self.primitive(), ((self.q - 1) / (sub - 1)) as u64))
    }

    /// Matrix over F_p of `x -> lambda x` in the digit basis.
    pub fn mul_matrix(&self, lambda: u32) -> FpMatrix {
        let e = self.e as usize;
        let pe = self.p.get();
        let cols: Vec<Vec<u32>> = (0..e).map(|k| self.digits(self.mul(lambda, pe.pow(k as u32)))).collect();
        FpMatrix::from_fn(self.p, e, e, |i, k| cols[k][i] as i64)
    }

    /// Absolute trace to the subfield of order `p^f`: `sum_{i < e/f} a^{p^{f i}}`.
    pub fn relative_trace(&self, a: u32, f: u32) -> u32 {
        let sub = self.p.get().pow(f) as u64;
        let mut acc = 0;
        let mut cur = a;
        for _ in 0..(self.e / f) {
            acc = self.add(acc, cur);
            cur = self.pow(cur, sub);
        }
        acc
    }
}

/// Successive powers `1, x, x^2, ...` modulo `modulus`, if `x` has order exactly `q - 1`.
fn powers_of_x(p: Prime, modulus: &[u32], q: u32) -> Option<Vec<u32>> {
    let e = modulus.len() - 1;
    let pe = p.get();
    let code = |v: &[u32]| v.iter().rev().fold(0u32, |acc, &d| acc * pe + d);
    let mut cur = vec![0u32; e];
    cur[0] = 1;
    let mut out = Vec::with_capacity(q as usize - 1);
    let mut seen = vec![false; q as usize];
    for _ in 0..q - 1 {
        let c = code(&cur);
        if c == 0 || seen[c as usize] {
            return None;
        }
        seen[c as usize] = true;
        out.push(c);
        // cur *= x, then reduce x^e = -(m_0 + ... + m_{e-1} x^{e-1}).
        let top = cur[e - 1];
        for i in (1..e).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        for i in 0..e {
            cur[i] = p.sub(cur[i], p.mul(top, modulus[i]));
        }
    }
    (code(&cur) == 1).then_some(out)
}
