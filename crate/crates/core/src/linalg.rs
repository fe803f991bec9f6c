//! Exact linear algebra over the prime field F_p.
//!
//! Matrices are dense and row-major with entries stored as reduced residues.
//! Row reduction is plain Gauss-Jordan elimination with first-nonzero
//! pivoting; the field is exact so pivot choice never affects the result.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A validated prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl Prime {
    /// Largest accepted modulus; products of two residues must fit in `u64`.
    pub const MAX: u32 = 1 << 31;

    pub fn new(p: u32) -> Result<Self> {
        if !(2..=Self::MAX).contains(&p) || !is_prime(p) {
            return Err(Error::NotPrime(p as u64));
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.0 as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.0;
        base %= self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        let a = a % self.0;
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.0 as u64 - 2))
        }
    }
}

impl TryFrom<u32> for Prime {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let n = n as u64;
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    p: Prime,
    value: u32,
}

impl Fp {
    pub fn new(p: Prime, v: i64) -> Self {
        Fp { p, value: p.reduce(v) }
    }

    pub fn zero(p: Prime) -> Self {
        Fp { p, value: 0 }
    }

    pub fn one(p: Prime) -> Self {
        Fp::new(p, 1)
    }

    pub fn modulus(self) -> Prime {
        self.p
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Option<Fp> {
        self.p.inv(self.value).map(|value| Fp { p: self.p, value })
    }

    fn check(self, other: Fp) {
        assert_eq!(self.p, other.p, "mixed moduli in F_p arithmetic");
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        self.check(rhs);
        Fp { p: self.p, value: self.p.add(self.value, rhs.value) }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self.check(rhs);
        Fp { p: self.p, value: self.p.sub(self.value, rhs.value) }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        self.check(rhs);
        Fp { p: self.p, value: self.p.mul(self.value, rhs.value) }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp { p: self.p, value: self.p.neg(self.value) }
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Dense row-major matrix over F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    p: Prime,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FpMatrix {
    pub fn zeros(p: Prime, rows: usize, cols: usize) -> Self {
        FpMatrix { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: Prime, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from integer rows, reducing every entry mod p.
    pub fn from_rows<R: AsRef<[i64]>>(p: Prime, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape(format!("row {i} has {} entries, expected {cols}", r.len())));
            }
            data.extend(r.iter().map(|&v| p.reduce(v)));
        }
        Ok(FpMatrix { p, rows: rows.len(), cols, data })
    }

    pub fn from_fn(p: Prime, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(p.reduce(f(i, j)));
            }
        }
        FpMatrix { p, rows, cols, data }
    }

    pub fn modulus(&self) -> Prime {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.p.get();
    }

    pub fn entry(&self, i: usize, j: usize) -> Fp {
        Fp { p: self.p, value: self.get(i, j) }
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = FpMatrix::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &FpMatrix) -> Result<FpMatrix> {
        if self.p != rhs.p {
            return Err(Error::ModulusMismatch(self.p.get(), rhs.p.get()));
        }
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let p = self.p.get() as u64;
        let mut out = FpMatrix::zeros(self.p, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    out.data[idx] = ((out.data[idx] as u64 + a * rhs.get(k, j) as u64) % p) as u32;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `M v`.
    pub fn mul_vec(&self, v: &[u32]) -> Result<Vec<u32>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!("vector of length {} against {} columns", v.len(), self.cols)));
        }
        let p = self.p.get() as u64;
        Ok((0..self.rows)
            .map(|i| {
                let s = self.row(i).iter().zip(v).map(|(&a, &b)| a as u64 * b as u64 % p).sum::<u64>();
                (s % p) as u32
            })
            .collect())
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let mut m = self.clone();
        let p = self.p;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(piv) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if piv != r {
                for j in 0..m.cols {
                    m.data.swap(piv * m.cols + j, r * m.cols + j);
                }
            }
            let inv = p.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in c..m.cols {
                let v = p.mul(m.get(r, j), inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c);
                if f == 0 {
                    continue;
                }
                for j in c..m.cols {
                    let v = p.sub(m.get(i, j), p.mul(f, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn is_alternating(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let p = self.p;
        (0..self.rows)
            .all(|i| self.get(i, i) == 0 && (i + 1..self.cols).all(|j| self.get(i, j) == p.neg(self.get(j, i))))
    }
}

impl fmt::Display for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// F_p-rank of `m`.
pub fn rank(m: &FpMatrix) -> usize {
    m.rref().1.len()
}

/// Basis of the right kernel `{v : M v = 0}`.
pub fn kernel_basis(m: &FpMatrix) -> Vec<Vec<u32>> {
    let p = m.p;
    let (r, pivots) = m.rref();
    let mut is_pivot = vec![None; m.cols];
    for (row, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(row);
    }
    (0..m.cols)
        .filter(|&f| is_pivot[f].is_none())
        .map(|f| {
            let mut v = vec![0u32; m.cols];
            v[f] = 1;
            for (row, &c) in pivots.iter().enumerate() {
                v[c] = p.neg(r.get(row, f));
            }
            v
        })
        .collect()
}

/// Rank of an alternating form; its radical has dimension `cols - rank`.
pub fn radical_rank(b: &FpMatrix) -> Result<usize> {
    if b.rows != b.cols {
        return Err(Error::NotAlternating(format!("{}x{} is not square", b.rows, b.cols)));
    }
    if !b.is_alternating() {
        return Err(Error::NotAlternating("expected B^T = -B with zero diagonal".into()));
    }
    Ok(rank(b))
}
