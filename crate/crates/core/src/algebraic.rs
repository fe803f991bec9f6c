//! Two-step nilpotent groups over finite fields whose commutator map should be
//! bilinear over a chosen scalar field: Heisenberg groups, the groups `E(g)`
//! with `v.w = v + w + [v, w]`, and the rank-one pseudo-quadratic model over a
//! quadratic extension.
//!
//! Bilinearity is checked at the level of `F_p`: a [`BiAddMapSpec`] stores the
//! values of a bi-additive map on an `F_p`-basis together with the matrices of
//! one field generator `lambda` acting on both spaces.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Gf;
use crate::linalg::{rank, FpMatrix, Prime};
use crate::report::CheckReport;

/// A bi-additive map `A x A -> N` between `F_p`-spaces with a scalar action of `F_q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiAddMapSpec {
    p: Prime,
    scalar_order: u32,
    dim_a: usize,
    dim_n: usize,
    /// `table[i * dim_a + j] = gamma(b_i, b_j)`.
    table: Vec<Vec<u32>>,
    lambda: u32,
    lambda_a: FpMatrix,
    lambda_n: FpMatrix,
}

impl BiAddMapSpec {
    pub fn new(
        p: Prime,
        scalar_order: u32,
        table: Vec<Vec<u32>>,
        lambda: u32,
        lambda_a: FpMatrix,
        lambda_n: FpMatrix,
    ) -> Result<Self> {
        let dim_a = lambda_a.rows();
        let dim_n = lambda_n.rows();
        if lambda_a.cols() != dim_a || lambda_n.cols() != dim_n {
            return Err(Error::Shape("scalar action matrices must be square".into()));
        }
        if table.len() != dim_a * dim_a || table.iter().any(|v| v.len() != dim_n) {
            return Err(Error::Shape(format!("table must hold {dim_a}x{dim_a} vectors of length {dim_n}")));
        }
        if lambda_a.modulus() != p || lambda_n.modulus() != p {
            return Err(Error::ModulusMismatch(p.get(), lambda_a.modulus().get()));
        }
        let table = table.into_iter().map(|v| v.into_iter().map(|x| p.reduce(x as i64)).collect()).collect();
        Ok(BiAddMapSpec { p, scalar_order, dim_a, dim_n, table, lambda, lambda_a, lambda_n })
    }

    pub fn modulus(&self) -> Prime {
        self.p
    }

    pub fn scalar_order(&self) -> u32 {
        self.scalar_order
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn value(&self, i: usize, j: usize) -> &[u32] {
        &self.table[i * self.dim_a + j]
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|v| v.iter().all(|&x| x == 0))
    }

    /// `gamma(x, y)` for coordinate vectors over F_p.
    pub fn eval(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        let p = self.p;
        let mut out = vec![0; self.dim_n];
        for (i, &xi) in x.iter().enumerate().filter(|(_, &v)| v != 0) {
            for (j, &yj) in y.iter().enumerate().filter(|(_, &v)| v != 0) {
                let c = p.mul(xi, yj);
                for (o, &g) in out.iter_mut().zip(self.value(i, j)) {
                    *o = p.add(*o, p.mul(c, g));
                }
            }
        }
        out
    }

    /// `gamma(v, v) = 0` for all `v`.
    pub fn is_alternating(&self) -> bool {
        (0..self.dim_a).all(|i| {
            self.value(i, i).iter().all(|&x| x == 0)
                && (0..self.dim_a)
                    .all(|j| self.value(i, j).iter().zip(self.value(j, i)).all(|(&a, &b)| self.p.add(a, b) == 0))
        })
    }

    /// `(v, w) -> gamma(f v, w)` for an F_p-linear map `f` on `A`.
    pub fn twisted(&self, f: &FpMatrix) -> Result<Self> {
        if f.rows() != self.dim_a || f.cols() != self.dim_a {
            return Err(Error::Shape("twist must act on A".into()));
        }
        let unit = |i: usize| (0..self.dim_a).map(|k| u32::from(k == i)).collect::<Vec<_>>();
        let mut table = Vec::with_capacity(self.table.len());
        for i in 0..self.dim_a {
            let fi = f.mul_vec(&unit(i))?;
            for j in 0..self.dim_a {
                table.push(self.eval(&fi, &unit(j)));
            }
        }
        Ok(BiAddMapSpec { table, ..self.clone() })
    }
}

/// Checks `gamma(lambda b_i, b_j) = lambda gamma(b_i, b_j) = gamma(b_i, lambda b_j)` on all basis pairs.
/// Since `F_q = F_p[lambda]` and `gamma` is bi-additive, this is bilinearity over `F_q`.
pub fn is_k_bilinear(spec: &BiAddMapSpec) -> CheckReport {
    let mut report = CheckReport::new(format!("bilinear over F_{}", spec.scalar_order));
    let unit = |i: usize| (0..spec.dim_a).map(|k| u32::from(k == i)).collect::<Vec<_>>();
    let lam_cols: Vec<Vec<u32>> = (0..spec.dim_a).map(|i| spec.lambda_a.mul_vec(&unit(i)).unwrap()).collect();
    for i in 0..spec.dim_a {
        for j in 0..spec.dim_a {
            let base = spec.value(i, j);
            let scaled = spec.lambda_n.mul_vec(base).unwrap();
            let left = spec.eval(&lam_cols[i], &unit(j));
            let right = spec.eval(&unit(i), &lam_cols[j]);
            report.record(left == scaled, || {
                format!(
                    "gamma(lambda b_{i}, b_{j}) = {left:?} but lambda gamma(b_{i}, b_{j}) = {scaled:?}, lambda = #{}",
                    spec.lambda
                )
            });
            report.record(right == scaled, || {
                format!(
                    "gamma(b_{i}, lambda b_{j}) = {right:?} but lambda gamma(b_{i}, b_{j}) = {scaled:?}, lambda = #{}",
                    spec.lambda
                )
            });
        }
    }
    report
}

fn block_diag(p: Prime, block: &FpMatrix, copies: usize) -> FpMatrix {
    let e = block.rows();
    FpMatrix::from_fn(p, e * copies, e * copies, |r, c| if r / e == c / e { block.get(r % e, c % e) as i64 } else { 0 })
}

/// Frobenius `x -> x^p` on each coordinate of `F_q^d`, as an F_p-matrix.
pub fn frobenius_matrix(field: &Gf, d: usize) -> FpMatrix {
    let e = field.degree() as usize;
    let pe = field.characteristic().get();
    let cols: Vec<Vec<u32>> = (0..e).map(|k| field.digits(field.frobenius(pe.pow(k as u32)))).collect();
    let block = FpMatrix::from_fn(field.characteristic(), e, e, |i, k| cols[k][i] as i64);
    block_diag(field.characteristic(), &block, d)
}

/// `(v, w) -> gamma(Frob(v), w)`: bi-additive, but only `lambda^p`-semilinear in the first slot.
pub fn frobenius_twist(spec: &BiAddMapSpec, field: &Gf) -> Result<BiAddMapSpec> {
    let e = field.degree() as usize;
    if !spec.dim_a.is_multiple_of(e) {
        return Err(Error::Shape("A is not a vector space over this field".into()));
    }
    spec.twisted(&frobenius_matrix(field, spec.dim_a / e))
}

/// Lowers a map `F_Q^da x F_Q^da -> F_Q^dn` (vectors of field codes) to F_p,
/// with `lambda` (an element of `F_Q` generating the scalar field of order `scalar_order`).
fn lower(
    field: &Gf,
    da: usize,
    dn: usize,
    scalar_order: u32,
    lambda: u32,
    gamma: impl Fn(&[u32], &[u32]) -> Vec<u32>,
) -> Result<BiAddMapSpec> {
    let p = field.characteristic();
    let e = field.degree() as usize;
    let basis = |idx: usize| {
        let mut v = vec![0u32; da];
        v[idx / e] = p.get().pow((idx % e) as u32);
        v
    };
    let mut table = Vec::with_capacity(da * e * da * e);
    for i in 0..da * e {
        for j in 0..da * e {
            let out = gamma(&basis(i), &basis(j));
            debug_assert_eq!(out.len(), dn);
            table.push(out.iter().flat_map(|&c| field.digits(c)).collect());
        }
    }
    let m = field.mul_matrix(lambda);
    BiAddMapSpec::new(p, scalar_order, table, lambda, block_diag(p, &m, da), block_diag(p, &m, dn))
}

/// Structure constants of a bilinear map over `F_q`, keyed by `"i,j"`.
/// A listed pair `(i, j)` whose transpose is not listed also sets `(j, i)` to its negative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureConstants {
    pub q: u32,
    #[serde(rename = "dimA")]
    pub dim_a: usize,
    #[serde(rename = "dimN")]
    pub dim_n: usize,
    pub table: BTreeMap<String, Vec<u32>>,
}

impl StructureConstants {
    /// The 3-dimensional Heisenberg Lie algebra `[e_0, e_1] = e_2`.
    pub fn heisenberg_algebra(q: u32) -> Self {
        StructureConstants { q, dim_a: 3, dim_n: 3, table: BTreeMap::from([("0,1".to_string(), vec![0, 0, 1])]) }
    }

    /// Dense `[i][j]` table of F_q vectors.
    pub fn dense(&self, field: &Gf) -> Result<Vec<Vec<Vec<u32>>>> {
        if field.order() != self.q {
            return Err(Error::Invalid(format!("expected a field of order {}", self.q)));
        }
        let mut out = vec![vec![vec![0u32; self.dim_n]; self.dim_a]; self.dim_a];
        let mut given = vec![vec![false; self.dim_a]; self.dim_a];
        for (key, value) in &self.table {
            let (i, j) = key
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)))
                .ok_or_else(|| Error::Parse(format!("bad table key {key:?}, expected \"i,j\"")))?;
            if i >= self.dim_a || j >= self.dim_a || value.len() != self.dim_n {
                return Err(Error::Shape(format!(
                    "entry {key:?} does not fit dimA = {}, dimN = {}",
                    self.dim_a, self.dim_n
                )));
            }
            if value.iter().any(|&c| c >= self.q) {
                return Err(Error::Invalid(format!("entry {key:?} has a coefficient outside F_{}", self.q)));
            }
            out[i][j] = value.clone();
            given[i][j] = true;
        }
        for i in 0..self.dim_a {
            for j in 0..self.dim_a {
                if given[i][j] && !given[j][i] {
                    out[j][i] = out[i][j].iter().map(|&c| field.neg(c)).collect();
                }
            }
        }
        Ok(out)
    }

    /// The F_q-bilinear extension, with scalars acting by a primitive element.
    pub fn to_spec(&self) -> Result<BiAddMapSpec> {
        let field = Gf::with_order(self.q)?;
        let dense = self.dense(&field)?;
        let bracket = |x: &[u32], y: &[u32]| apply_bilinear(&field, &dense, self.dim_n, x, y);
        lower(&field, self.dim_a, self.dim_n, self.q, field.primitive(), bracket)
    }
}

fn apply_bilinear(field: &Gf, dense: &[Vec<Vec<u32>>], dn: usize, x: &[u32], y: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; dn];
    for (i, &xi) in x.iter().enumerate().filter(|(_, &v)| v != 0) {
        for (j, &yj) in y.iter().enumerate().filter(|(_, &v)| v != 0) {
            let c = field.mul(xi, yj);
            for (o, &g) in out.iter_mut().zip(&dense[i][j]) {
                *o = field.add(*o, field.mul(c, g));
            }
        }
    }
    out
}

fn dot(field: &Gf, x: &[u32], y: &[u32]) -> u32 {
    x.iter().zip(y).fold(0, |acc, (&a, &b)| field.add(acc, field.mul(a, b)))
}

fn vadd(field: &Gf, x: &[u32], y: &[u32]) -> Vec<u32> {
    x.iter().zip(y).map(|(&a, &b)| field.add(a, b)).collect()
}

fn vneg(field: &Gf, x: &[u32]) -> Vec<u32> {
    x.iter().map(|&a| field.neg(a)).collect()
}

fn base_q_digits(q: u32, mut code: u64, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = (code % q as u64) as u32;
            code /= q as u64;
            d
        })
        .collect()
}

/// A finite two-step nilpotent group with a central subgroup `N` and its commutator map.
pub trait AlgebraicModel: Sync {
    fn name(&self) -> String;
    fn size(&self) -> u64;
    fn element(&self, code: u64) -> Vec<u32>;
    fn mul(&self, g: &[u32], h: &[u32]) -> Vec<u32>;
    fn inv(&self, g: &[u32]) -> Vec<u32>;
    /// F_p coordinates of the image in `A = G / N`.
    fn a_coords(&self, g: &[u32]) -> Vec<u32>;
    /// F_p coordinates in `N`, or `None` when `g` lies outside `N`.
    fn central_coords(&self, g: &[u32]) -> Option<Vec<u32>>;
    fn commutator_map(&self) -> &BiAddMapSpec;

    fn commutator(&self, g: &[u32], h: &[u32]) -> Vec<u32> {
        let gh = self.mul(g, h);
        self.mul(&self.mul(&gh, &self.inv(g)), &self.inv(h))
    }
}

/// Groups up to this size are checked on all pairs of elements.
pub const LITERAL_CHECK_LIMIT: u64 = 1 << 12;

/// Compares literal commutators `g h g^-1 h^-1` with the commutator map:
/// on all element pairs when `|G| <= 2^12`, otherwise on the first 4096 elements.
pub fn verify_literal_commutators<M: AlgebraicModel>(model: &M) -> CheckReport {
    let mut report = CheckReport::new(format!("literal commutators of {}", model.name()));
    let n = model.size().min(LITERAL_CHECK_LIMIT);
    if model.size() > LITERAL_CHECK_LIMIT {
        report.note(format!("checked the first {n} of {} elements", model.size()));
    }
    let spec = model.commutator_map();
    let results: Vec<(u64, Option<String>)> = (0..n)
        .into_par_iter()
        .map(|a| {
            let g = model.element(a);
            let ga = model.a_coords(&g);
            let mut first = None;
            for b in 0..n {
                let h = model.element(b);
                let c = model.commutator(&g, &h);
                let expected = spec.eval(&ga, &model.a_coords(&h));
                if first.is_none() && model.central_coords(&c).as_ref() != Some(&expected) {
                    first = Some(format!("[{g:?}, {h:?}] = {c:?}, expected central value {expected:?}"));
                }
            }
            (n, first)
        })
        .collect();
    for (count, first) in results {
        report.checked += count - u64::from(first.is_some());
        if let Some(msg) = first {
            report.record(false, || msg);
        }
    }
    report
}

/// The Heisenberg group on `F_q^n x F_q^n x F_q` with cocycle `u . v'`.
#[derive(Debug, Clone)]
pub struct Heisenberg {
    field: Gf,
    n: usize,
    spec: BiAddMapSpec,
}

pub fn heisenberg(n: usize, q: u32) -> Result<Heisenberg> {
    if n == 0 {
        return Err(Error::Invalid("Heisenberg groups need n >= 1".into()));
    }
    let field = Gf::with_order(q)?;
    let symplectic = |x: &[u32], y: &[u32]| {
        let (u, v) = x.split_at(n);
        let (u2, v2) = y.split_at(n);
        vec![field.sub(dot(&field, u, v2), dot(&field, u2, v))]
    };
    let spec = lower(&field, 2 * n, 1, q, field.primitive(), symplectic)?;
    Ok(Heisenberg { field, n, spec })
}

impl Heisenberg {
    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

impl AlgebraicModel for Heisenberg {
    fn name(&self) -> String {
        format!("Heisenberg(n = {}, q = {})", self.n, self.field.order())
    }

    fn size(&self) -> u64 {
        (self.field.order() as u64).pow(2 * self.n as u32 + 1)
    }

    fn element(&self, code: u64) -> Vec<u32> {
        base_q_digits(self.field.order(), code, 2 * self.n + 1)
    }

    fn mul(&self, g: &[u32], h: &[u32]) -> Vec<u32> {
        let f = &self.field;
        let n = self.n;
        let mut out = vadd(f, &g[..2 * n], &h[..2 * n]);
        out.push(f.add(f.add(g[2 * n], h[2 * n]), dot(f, &g[..n], &h[n..2 * n])));
        out
    }

    fn inv(&self, g: &[u32]) -> Vec<u32> {
        let f = &self.field;
        let n = self.n;
        let mut out = vneg(f, &g[..2 * n]);
        out.push(f.add(f.neg(g[2 * n]), dot(f, &g[..n], &g[n..2 * n])));
        out
    }

    fn a_coords(&self, g: &[u32]) -> Vec<u32> {
        g[..2 * self.n].iter().flat_map(|&c| self.field.digits(c)).collect()
    }

    fn central_coords(&self, g: &[u32]) -> Option<Vec<u32>> {
        g[..2 * self.n].iter().all(|&c| c == 0).then(|| self.field.digits(g[2 * self.n]))
    }

    fn commutator_map(&self) -> &BiAddMapSpec {
        &self.spec
    }
}

/// The group `E(g)` on a two-step nilpotent Lie algebra, `v.w = v + w + [v, w]`.
#[derive(Debug, Clone)]
pub struct LazardGroup {
    field: Gf,
    dim: usize,
    bracket: Vec<Vec<Vec<u32>>>,
    /// F_p basis of the derived algebra, as rows.
    derived: Vec<Vec<u32>>,
    spec: BiAddMapSpec,
}

pub fn lazard_e(constants: &StructureConstants) -> Result<LazardGroup> {
    if constants.dim_a != constants.dim_n {
        return Err(Error::Shape("a Lie bracket needs dimA = dimN".into()));
    }
    let field = Gf::with_order(constants.q)?;
    let dim = constants.dim_a;
    let bracket = constants.dense(&field)?;
    let br = |x: &[u32], y: &[u32]| apply_bilinear(&field, &bracket, dim, x, y);
    let unit = |i: usize| (0..dim).map(|k| u32::from(k == i)).collect::<Vec<_>>();
    #[allow(clippy::needless_range_loop)]
    for i in 0..dim {
        if bracket[i][i].iter().any(|&c| c != 0) {
            return Err(Error::Invalid(format!("[e_{i}, e_{i}] != 0: bracket is not alternating")));
        }
        for j in 0..dim {
            if bracket[i][j] != vneg(&field, &bracket[j][i]) {
                return Err(Error::Invalid(format!("[e_{i}, e_{j}] != -[e_{j}, e_{i}]")));
            }
            for k in 0..dim {
                if br(&bracket[i][j], &unit(k)).iter().any(|&c| c != 0) {
                    return Err(Error::Invalid(format!("[[e_{i}, e_{j}], e_{k}] != 0: not two-step nilpotent")));
                }
            }
        }
    }
    let two = field.from_int(2);
    let gamma = |x: &[u32], y: &[u32]| br(x, y).into_iter().map(|c| field.mul(two, c)).collect::<Vec<_>>();
    let spec = lower(&field, dim, dim, constants.q, field.primitive(), gamma)?;
    let p = field.characteristic();
    let pe = p.get();
    let mut derived: Vec<Vec<u32>> = Vec::new();
    for value in bracket.iter().flatten() {
        for k in 0..field.degree() {
            let row: Vec<u32> = value.iter().flat_map(|&c| field.digits(field.mul(c, pe.pow(k)))).collect();
            if extends_span(p, &derived, &row) {
                derived.push(row);
            }
        }
    }
    Ok(LazardGroup { field, dim, bracket, derived, spec })
}

fn extends_span(p: Prime, rows: &[Vec<u32>], v: &[u32]) -> bool {
    if v.iter().all(|&x| x == 0) {
        return false;
    }
    let to_i64 = |r: &Vec<u32>| r.iter().map(|&x| x as i64).collect::<Vec<i64>>();
    let mut all: Vec<Vec<i64>> = rows.iter().map(to_i64).collect();
    all.push(to_i64(&v.to_vec()));
    let m = FpMatrix::from_rows(p, &all).expect("rows share a length");
    rank(&m) == rows.len() + 1
}

impl LazardGroup {
    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn is_abelian(&self) -> bool {
        self.spec.is_zero()
    }
}

impl AlgebraicModel for LazardGroup {
    fn name(&self) -> String {
        format!("E(g) (dim {}, q = {})", self.dim, self.field.order())
    }

    fn size(&self) -> u64 {
        (self.field.order() as u64).pow(self.dim as u32)
    }

    fn element(&self, code: u64) -> Vec<u32> {
        base_q_digits(self.field.order(), code, self.dim)
    }

    fn mul(&self, g: &[u32], h: &[u32]) -> Vec<u32> {
        let b = apply_bilinear(&self.field, &self.bracket, self.dim, g, h);
        vadd(&self.field, &vadd(&self.field, g, h), &b)
    }

    fn inv(&self, g: &[u32]) -> Vec<u32> {
        vneg(&self.field, g)
    }

    fn a_coords(&self, g: &[u32]) -> Vec<u32> {
        g.iter().flat_map(|&c| self.field.digits(c)).collect()
    }

    fn central_coords(&self, g: &[u32]) -> Option<Vec<u32>> {
        let coords = self.a_coords(g);
        let inside =
            coords.iter().all(|&x| x == 0) || !extends_span(self.field.characteristic(), &self.derived, &coords);
        inside.then_some(coords)
    }

    fn commutator_map(&self) -> &BiAddMapSpec {
        &self.spec
    }
}

/// Skew-hermitian data over `K = F_{q^2}` with involution `theta(x) = x^q`.
/// `h` holds field codes of `K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PseudoQuadraticSpec {
    pub q: u32,
    pub n: usize,
    pub h: Vec<Vec<u32>>,
}

impl PseudoQuadraticSpec {
    /// Diagonal form `eta * I` with `eta^theta = -eta`, `eta != 0`.
    pub fn standard(q: u32, n: usize) -> Result<Self> {
        let base = Gf::with_order(q)?;
        let k = Gf::new(base.characteristic(), 2 * base.degree())?;
        let eta = if q.is_multiple_of(2) { 1 } else { k.pow(k.primitive(), (q as u64).div_ceil(2)) };
        let h = (0..n).map(|i| (0..n).map(|j| if i == j { eta } else { 0 }).collect()).collect();
        Ok(PseudoQuadraticSpec { q, n, h })
    }
}

/// The group `{(v, a) in K^n x K : q_form(v) - a in D_0}` with
/// `(v, a)(w, b) = (v + w, a + b + h(w, v))`, where `D_0 = F_q` is the fixed field of `theta`.
#[derive(Debug, Clone)]
pub struct PseudoQuadraticGroup {
    k: Gf,
    q: u32,
    n: usize,
    h: Vec<Vec<u32>>,
    epsilon: u32,
    fixed: Vec<u32>,
    spec_base: BiAddMapSpec,
    spec_ext: BiAddMapSpec,
}

pub fn pseudo_quadratic_group(spec: &PseudoQuadraticSpec) -> Result<PseudoQuadraticGroup> {
    let base = Gf::with_order(spec.q)?;
    let k = Gf::new(base.characteristic(), 2 * base.degree())?;
    let n = spec.n;
    if n == 0 || spec.h.len() != n || spec.h.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("hermitian matrix must be {n}x{n} with n >= 1")));
    }
    if spec.h.iter().flatten().any(|&c| c >= k.order()) {
        return Err(Error::Invalid(format!("hermitian entries must be codes in F_{}", k.order())));
    }
    let q = spec.q;
    let theta = |x: u32| k.pow(x, q as u64);
    for i in 0..n {
        for j in 0..n {
            if theta(spec.h[j][i]) != k.neg(spec.h[i][j]) {
                return Err(Error::Invalid(format!("H is not skew-hermitian at ({i}, {j})")));
            }
        }
    }
    let fixed: Vec<u32> = k.elements().filter(|&x| theta(x) == x).collect();
    let epsilon = k
        .elements()
        .find(|&x| k.add(x, theta(x)) == 1)
        .ok_or_else(|| Error::Invalid("trace is not surjective".into()))?;
    let lambda_base = k.subfield_generator(base.degree())?;
    let gamma =
        |x: &[u32], y: &[u32]| vec![k.sub(hermitian_form(&k, q, &spec.h, y, x), hermitian_form(&k, q, &spec.h, x, y))];
    let spec_base = lower(&k, n, 1, q, lambda_base, gamma)?;
    let spec_ext = lower(&k, n, 1, k.order(), k.primitive(), gamma)?;
    Ok(PseudoQuadraticGroup { k, q, n, h: spec.h.clone(), epsilon, fixed, spec_base, spec_ext })
}

fn hermitian_form(k: &Gf, q: u32, h: &[Vec<u32>], v: &[u32], w: &[u32]) -> u32 {
    let mut acc = 0;
    for (i, row) in h.iter().enumerate() {
        let vi = k.pow(v[i], q as u64);
        for (j, &hij) in row.iter().enumerate() {
            acc = k.add(acc, k.mul(k.mul(vi, hij), w[j]));
        }
    }
    acc
}

impl PseudoQuadraticGroup {
    pub fn extension_field(&self) -> &Gf {
        &self.k
    }

    pub fn theta(&self, x: u32) -> u32 {
        self.k.pow(x, self.q as u64)
    }

    /// `h(v, w) = sum v_i^theta H_ij w_j`.
    pub fn hermitian(&self, v: &[u32], w: &[u32]) -> u32 {
        hermitian_form(&self.k, self.q, &self.h, v, w)
    }

    /// `sum_{i<j} v_i^theta H_ij v_j + sum_i epsilon v_i^theta H_ii v_i` with `Tr(epsilon) = 1`.
    pub fn q_form(&self, v: &[u32]) -> u32 {
        let k = &self.k;
        let mut acc = 0;
        for i in 0..self.n {
            for j in i..self.n {
                let mut t = k.mul(k.mul(self.theta(v[i]), self.h[i][j]), v[j]);
                if i == j {
                    t = k.mul(self.epsilon, t);
                }
                acc = k.add(acc, t);
            }
        }
        acc
    }

    /// `h(w, v) - h(v, w)`, valued in `D_0`.
    pub fn gamma(&self, v: &[u32], w: &[u32]) -> u32 {
        self.k.sub(self.hermitian(w, v), self.hermitian(v, w))
    }

    pub fn in_d0(&self, a: u32) -> bool {
        self.theta(a) == a
    }

    pub fn contains(&self, g: &[u32]) -> bool {
        self.in_d0(self.k.sub(self.q_form(&g[..self.n]), g[self.n]))
    }

    /// `a^theta D_0 a ⊆ D_0` for every `a` in `D_0`.
    pub fn d0_is_stable(&self) -> bool {
        let k = &self.k;
        self.fixed.iter().all(|&a| self.fixed.iter().all(|&d| self.in_d0(k.mul(k.mul(self.theta(a), d), a))))
    }

    /// The commutator map with `F_{q^2}` acting by a primitive element.
    pub fn commutator_map_over_extension(&self) -> &BiAddMapSpec {
        &self.spec_ext
    }
}

impl AlgebraicModel for PseudoQuadraticGroup {
    fn name(&self) -> String {
        format!("pseudo-quadratic(n = {}, q = {})", self.n, self.q)
    }

    fn size(&self) -> u64 {
        (self.k.order() as u64).pow(self.n as u32) * self.q as u64
    }

    /// Digits: `v` in base `q^2`, then an index into `D_0`.
    fn element(&self, code: u64) -> Vec<u32> {
        let qq = self.k.order() as u64;
        let v_count = qq.pow(self.n as u32);
        let mut v = base_q_digits(self.k.order(), code % v_count, self.n);
        let c = self.fixed[(code / v_count) as usize];
        v.push(self.k.sub(self.q_form(&v), c));
        v
    }

    fn mul(&self, g: &[u32], h: &[u32]) -> Vec<u32> {
        let k = &self.k;
        let (v, w) = (&g[..self.n], &h[..self.n]);
        let mut out = vadd(k, v, w);
        out.push(k.add(k.add(g[self.n], h[self.n]), self.hermitian(w, v)));
        out
    }

    fn inv(&self, g: &[u32]) -> Vec<u32> {
        let k = &self.k;
        let v = &g[..self.n];
        let mut out = vneg(k, v);
        out.push(k.add(k.neg(g[self.n]), self.hermitian(v, v)));
        out
    }

    fn a_coords(&self, g: &[u32]) -> Vec<u32> {
        g[..self.n].iter().flat_map(|&c| self.k.digits(c)).collect()
    }

    fn central_coords(&self, g: &[u32]) -> Option<Vec<u32>> {
        let in_n = g[..self.n].iter().all(|&c| c == 0) && self.in_d0(g[self.n]);
        in_n.then(|| self.k.digits(g[self.n]))
    }

    /// Over the fixed field `F_q`.
    fn commutator_map(&self) -> &BiAddMapSpec {
        &self.spec_base
    }
}
