//! Finite-window model of the envelope `E = Â_W ⋉ Q`.
//!
//! `Q` is a window quotient `A_W x C` of a central extension, with
//! `C = F_p` (identified with the image of a central character) and product
//! `(x, c)(y, e) = (x + y, c + e + sum x_i y_j c(i, j))`. Characters of `A_W`
//! are coefficient functionals `phi`, acting on `Q` by `(x, c) -> (x, c + phi.x)`.
//! Everything is written additively.

use std::collections::HashSet;
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cocycle::{CocycleSpec, SigmaSeq};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::linalg::{rank, FpMatrix, Prime};
use crate::report::CheckReport;
use crate::typei::CharacterSpec;

/// Where a window group came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub cocycle: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<SigmaSeq>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub character: Option<CharacterSpec>,
}

/// A finite two-step nilpotent group `Q = A_W x C` presented by its pairing table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawWindowGroup", into = "RawWindowGroup")]
pub struct FiniteWindowGroup {
    p: Prime,
    basis: Vec<i64>,
    pairing: FpMatrix,
    provenance: Option<Provenance>,
}

#[derive(Serialize, Deserialize)]
struct RawWindowGroup {
    p: u32,
    basis: Vec<i64>,
    pairing: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

impl TryFrom<RawWindowGroup> for FiniteWindowGroup {
    type Error = Error;

    fn try_from(raw: RawWindowGroup) -> Result<Self> {
        let p = Prime::new(raw.p)?;
        let w = raw.basis.len();
        let pairing = if raw.pairing.is_empty() && w == 0 {
            FpMatrix::zeros(p, 0, 0)
        } else {
            FpMatrix::from_rows(p, &raw.pairing)?
        };
        let mut g = FiniteWindowGroup::from_pairing(p, raw.basis, pairing)?;
        g.provenance = raw.provenance;
        Ok(g)
    }
}

impl From<FiniteWindowGroup> for RawWindowGroup {
    fn from(g: FiniteWindowGroup) -> Self {
        let pairing = g.pairing.to_rows().into_iter().map(|r| r.into_iter().map(i64::from).collect()).collect();
        RawWindowGroup { p: g.p.get(), basis: g.basis, pairing, provenance: g.provenance }
    }
}

/// An element `(x, c)` of `Q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QElem {
    pub x: Vec<u32>,
    pub c: u32,
}

impl FiniteWindowGroup {
    pub fn from_pairing(p: Prime, basis: Vec<i64>, pairing: FpMatrix) -> Result<Self> {
        let w = basis.len();
        if pairing.rows() != w || pairing.cols() != w {
            return Err(Error::Shape(format!(
                "pairing is {}x{}, basis has {w} entries",
                pairing.rows(),
                pairing.cols()
            )));
        }
        if pairing.modulus() != p {
            return Err(Error::ModulusMismatch(p.get(), pairing.modulus().get()));
        }
        if basis.iter().collect::<HashSet<_>>().len() != w {
            return Err(Error::Invalid("basis exponents must be distinct".into()));
        }
        Ok(FiniteWindowGroup { p, basis, pairing, provenance: None })
    }

    /// `c(i, j) = chi(omega(t^{b_i}, t^{b_j}))`.
    pub fn from_cocycle(omega: &CocycleSpec, chi: &CharacterSpec, basis: Vec<i64>) -> Result<Self> {
        let p = omega.modulus();
        if chi.modulus() != p {
            return Err(Error::ModulusMismatch(p.get(), chi.modulus().get()));
        }
        let w = basis.len();
        let mut pairing = FpMatrix::zeros(p, w, w);
        for i in 0..w {
            for j in 0..w {
                let v = omega.eval(&LaurentPoly::t_pow(p, basis[i]), &LaurentPoly::t_pow(p, basis[j]))?;
                pairing.set(i, j, chi.eval(&v));
            }
        }
        let mut g = Self::from_pairing(p, basis, pairing)?;
        let s = match omega {
            CocycleSpec::EtaS(s) => Some(s.clone()),
            _ => None,
        };
        let cocycle = match omega {
            CocycleSpec::EtaS(_) => "eta_s",
            CocycleSpec::MonomialGamma(_) => "monomial",
            CocycleSpec::Table(_) => "table",
        };
        g.provenance = Some(Provenance { cocycle: cocycle.into(), s, character: Some(chi.clone()) });
        Ok(g)
    }

    /// `n` pairwise commuting Heisenberg blocks: `c(2k, 2k + 1) = 1` and zero elsewhere.
    pub fn heisenberg_blocks(p: Prime, n: usize) -> Result<Self> {
        let w = 2 * n;
        let pairing = FpMatrix::from_fn(p, w, w, |i, j| i64::from(i % 2 == 0 && j == i + 1));
        let mut g = Self::from_pairing(p, (0..w as i64).collect(), pairing)?;
        g.provenance = Some(Provenance { cocycle: format!("{n} heisenberg blocks"), s: None, character: None });
        Ok(g)
    }

    pub fn modulus(&self) -> Prime {
        self.p
    }

    pub fn basis(&self) -> &[i64] {
        &self.basis
    }

    pub fn window_size(&self) -> usize {
        self.basis.len()
    }

    pub fn pairing(&self) -> &FpMatrix {
        &self.pairing
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    /// `sum x_i y_j c(i, j)`.
    pub fn pair(&self, x: &[u32], y: &[u32]) -> u32 {
        let p = self.p;
        let mut acc = 0;
        for (i, &xi) in x.iter().enumerate().filter(|(_, &v)| v != 0) {
            for (j, &yj) in y.iter().enumerate().filter(|(_, &v)| v != 0) {
                acc = p.add(acc, p.mul(p.mul(xi, yj), self.pairing.get(i, j)));
            }
        }
        acc
    }

    /// `x^T (c - c^T) y`, the commutator pairing.
    pub fn commutator_pairing(&self, x: &[u32], y: &[u32]) -> u32 {
        self.p.sub(self.pair(x, y), self.pair(y, x))
    }

    fn vadd(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        x.iter().zip(y).map(|(&a, &b)| self.p.add(a, b)).collect()
    }

    fn vneg(&self, x: &[u32]) -> Vec<u32> {
        x.iter().map(|&a| self.p.neg(a)).collect()
    }

    fn dot(&self, x: &[u32], y: &[u32]) -> u32 {
        x.iter().zip(y).fold(0, |acc, (&a, &b)| self.p.add(acc, self.p.mul(a, b)))
    }

    pub fn q_mul(&self, g: &QElem, h: &QElem) -> QElem {
        let c = self.p.add(self.p.add(g.c, h.c), self.pair(&g.x, &h.x));
        QElem { x: self.vadd(&g.x, &h.x), c }
    }

    pub fn q_inv(&self, g: &QElem) -> QElem {
        let neg = self.vneg(&g.x);
        let c = self.p.sub(self.p.neg(g.c), self.pair(&g.x, &neg));
        QElem { x: neg, c }
    }

    pub fn q_identity(&self) -> QElem {
        QElem { x: vec![0; self.window_size()], c: 0 }
    }

    fn check_len(&self, v: &[u32]) -> Result<()> {
        if v.len() != self.window_size() {
            return Err(Error::Shape(format!(
                "vector of length {} in a window of size {}",
                v.len(),
                self.window_size()
            )));
        }
        Ok(())
    }
}

fn digits(p: Prime, mut code: u64, len: usize) -> Vec<u32> {
    let q = p.get() as u64;
    (0..len)
        .map(|_| {
            let d = (code % q) as u32;
            code /= q;
            d
        })
        .collect()
}

/// Finite group interface used by the generic verification routines.
pub trait FiniteGroup: Sync {
    type Elem: Clone + Eq + Hash + Debug + Send + Sync;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, g: &Self::Elem, h: &Self::Elem) -> Self::Elem;
    fn inv(&self, g: &Self::Elem) -> Self::Elem;
    /// `log_p |G|` together with `p`.
    fn order(&self) -> (Prime, u32);
    /// The element with the given index in `0..|G|`.
    fn element(&self, code: u64) -> Self::Elem;
    fn generators(&self) -> Vec<Self::Elem>;
    /// The subgroup claimed to contain `[G, G]` and lie in the center.
    fn designated_center(&self) -> Vec<Self::Elem>;
    fn in_designated_center(&self, g: &Self::Elem) -> bool;

    fn size(&self) -> u64 {
        let (p, e) = self.order();
        (p.get() as u64).pow(e)
    }

    fn commutator(&self, g: &Self::Elem, h: &Self::Elem) -> Self::Elem {
        let gh = self.mul(g, h);
        self.mul(&self.mul(&gh, &self.inv(g)), &self.inv(h))
    }
}

/// Element `(phi, (x, c))` of the envelope.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SemidirectElement {
    pub phi: Vec<u32>,
    pub x: Vec<u32>,
    pub c: u32,
}

impl SemidirectElement {
    pub fn from_q(w: usize, q: QElem) -> Self {
        SemidirectElement { phi: vec![0; w], x: q.x, c: q.c }
    }

    pub fn is_identity(&self) -> bool {
        self.c == 0 && self.phi.iter().chain(&self.x).all(|&v| v == 0)
    }
}

/// The envelope `E = Â_W ⋉ Q` over a window group.
#[derive(Debug, Clone)]
pub struct Envelope {
    q: Arc<FiniteWindowGroup>,
}

/// Groups up to this many elements are verified by enumeration.
pub const ENUMERATION_LIMIT: u64 = 1 << 13;

impl Envelope {
    pub fn new(q: FiniteWindowGroup) -> Self {
        Envelope { q: Arc::new(q) }
    }

    pub fn group(&self) -> &FiniteWindowGroup {
        &self.q
    }

    pub fn window_size(&self) -> usize {
        self.q.window_size()
    }

    fn check(&self, g: &SemidirectElement) -> Result<()> {
        self.q.check_len(&g.phi)?;
        self.q.check_len(&g.x)
    }

    /// `(phi, g)(psi, h) = (phi + psi, g h - psi(x_g))`.
    pub fn e_mul(&self, g: &SemidirectElement, h: &SemidirectElement) -> Result<SemidirectElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul_unchecked(g, h))
    }

    fn mul_unchecked(&self, g: &SemidirectElement, h: &SemidirectElement) -> SemidirectElement {
        let q = &self.q;
        let p = q.p;
        let c = p.sub(p.add(p.add(g.c, h.c), q.pair(&g.x, &h.x)), q.dot(&h.phi, &g.x));
        SemidirectElement { phi: q.vadd(&g.phi, &h.phi), x: q.vadd(&g.x, &h.x), c }
    }

    pub fn e_inv(&self, g: &SemidirectElement) -> Result<SemidirectElement> {
        self.check(g)?;
        Ok(self.inv_unchecked(g))
    }

    fn inv_unchecked(&self, g: &SemidirectElement) -> SemidirectElement {
        let q = &self.q;
        let p = q.p;
        let neg = q.vneg(&g.x);
        let c = p.sub(p.sub(p.neg(g.c), q.pair(&g.x, &neg)), q.dot(&g.phi, &g.x));
        SemidirectElement { phi: q.vneg(&g.phi), x: neg, c }
    }

    /// `[(phi, g), (psi, h)] = (0, (0, [x_g, x_h] - psi(x_g) + phi(x_h)))`.
    pub fn e_commutator(&self, g: &SemidirectElement, h: &SemidirectElement) -> Result<SemidirectElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.closed_commutator(g, h))
    }

    fn closed_commutator(&self, g: &SemidirectElement, h: &SemidirectElement) -> SemidirectElement {
        let q = &self.q;
        let p = q.p;
        let c = p.add(p.sub(q.commutator_pairing(&g.x, &h.x), q.dot(&h.phi, &g.x)), q.dot(&g.phi, &h.x));
        let w = self.window_size();
        SemidirectElement { phi: vec![0; w], x: vec![0; w], c }
    }

    /// `q -> (0, q)`.
    pub fn embed(&self, g: &QElem) -> SemidirectElement {
        SemidirectElement::from_q(self.window_size(), g.clone())
    }
}

impl FiniteGroup for Envelope {
    type Elem = SemidirectElement;

    fn identity(&self) -> SemidirectElement {
        let w = self.window_size();
        SemidirectElement { phi: vec![0; w], x: vec![0; w], c: 0 }
    }

    fn mul(&self, g: &SemidirectElement, h: &SemidirectElement) -> SemidirectElement {
        self.mul_unchecked(g, h)
    }

    fn inv(&self, g: &SemidirectElement) -> SemidirectElement {
        self.inv_unchecked(g)
    }

    fn order(&self) -> (Prime, u32) {
        (self.q.p, 2 * self.window_size() as u32 + 1)
    }

    /// Digits are read as `phi`, then `x`, then `c`, least significant first.
    fn element(&self, code: u64) -> SemidirectElement {
        let w = self.window_size();
        let d = digits(self.q.p, code, 2 * w + 1);
        SemidirectElement { phi: d[..w].to_vec(), x: d[w..2 * w].to_vec(), c: d[2 * w] }
    }

    fn generators(&self) -> Vec<SemidirectElement> {
        let w = self.window_size();
        let unit = |i: usize| {
            let mut v = vec![0; w];
            v[i] = 1;
            v
        };
        let mut gens = Vec::with_capacity(2 * w + 1);
        for i in 0..w {
            gens.push(SemidirectElement { phi: unit(i), x: vec![0; w], c: 0 });
        }
        for i in 0..w {
            gens.push(SemidirectElement { phi: vec![0; w], x: unit(i), c: 0 });
        }
        gens.push(SemidirectElement { phi: vec![0; w], x: vec![0; w], c: 1 });
        gens
    }

    fn designated_center(&self) -> Vec<SemidirectElement> {
        let w = self.window_size();
        (0..self.q.p.get()).map(|c| SemidirectElement { phi: vec![0; w], x: vec![0; w], c }).collect()
    }

    fn in_designated_center(&self, g: &SemidirectElement) -> bool {
        g.phi.iter().chain(&g.x).all(|&v| v == 0)
    }
}

/// Checks `[G, G] ⊆ C̄ ⊆ Z(G)`: by enumeration when `|G| <= 2^13`, otherwise
/// on generators, which suffices once generator commutators land in a central subgroup.
pub fn verify_class2_and_center<G: FiniteGroup>(g: &G) -> CheckReport {
    let mut report = CheckReport::new("class two with designated center");
    let size = g.size();
    let (elements, mode): (Vec<G::Elem>, _) = if size <= ENUMERATION_LIMIT {
        ((0..size).map(|c| g.element(c)).collect(), "enumeration")
    } else {
        (g.generators(), "generators")
    };
    report.note(format!("mode: {mode}, |G| = {size}"));
    let bad_commutator = elements
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let mut hits = 0u64;
            let mut first = None;
            for b in &elements {
                hits += 1;
                let c = g.commutator(a, b);
                if first.is_none() && !g.in_designated_center(&c) {
                    first = Some(format!("[{a:?}, {b:?}] = {c:?} lies outside the designated center"));
                }
            }
            (i, hits, first)
        })
        .collect::<Vec<_>>();
    for (_, hits, first) in bad_commutator {
        report.checked += hits - u64::from(first.is_some());
        if let Some(msg) = first {
            report.record(false, || msg);
        }
    }
    for z in g.designated_center() {
        for b in &elements {
            let ok = g.mul(&z, b) == g.mul(b, &z);
            report.record(ok, || format!("{z:?} does not commute with {b:?}"));
        }
    }
    report
}

/// Image of `omega_sigma` and its two slices from the proof of surjectivity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OmegaImage {
    pub sigma: u32,
    /// `log_p` of the image size, and of the full dual of `E / C̄`.
    pub image_exponent: usize,
    pub dual_exponent: usize,
    /// `{omega(phi, 1)}`: the `{1} x Â_W` slice.
    pub phi_slice_exponent: usize,
    /// `{omega(phi_g, g)}` with `phi_g = -[g, .]`: the `A_W x {1}` slice.
    pub g_slice_exponent: usize,
    pub surjective: bool,
}

/// `omega_sigma(a)` evaluated on the generators of `E / C̄` (the `psi` directions, then the `x` directions),
/// read off literal commutators.
fn omega_vector<G: FiniteGroup<Elem = SemidirectElement>>(
    e: &G,
    w: usize,
    sigma: u32,
    p: Prime,
    a: &SemidirectElement,
) -> Vec<u32> {
    e.generators()[..2 * w].iter().map(|b| p.mul(sigma, e.commutator(a, b).c)).collect()
}

fn span_exponent(p: Prime, vectors: &[Vec<u32>], width: usize) -> Result<usize> {
    if vectors.is_empty() {
        return Ok(0);
    }
    let rows: Vec<Vec<i64>> = vectors.iter().map(|v| v.iter().map(|&x| x as i64).collect()).collect();
    let m = FpMatrix::from_rows(p, &rows)?;
    debug_assert_eq!(m.cols(), width);
    Ok(rank(&m))
}

/// Checks that `omega_sigma` maps onto the dual of `E / C̄`, of size `p^{2w}`.
/// In enumeration mode the image is collected as a set; otherwise its rank on generators is used.
pub fn omega_sigma_surjective<G>(e: &G, w: usize, sigma: u32) -> Result<(CheckReport, OmegaImage)>
where
    G: FiniteGroup<Elem = SemidirectElement>,
{
    let (p, _) = e.order();
    let sigma = p.reduce(sigma as i64);
    if sigma == 0 {
        return Err(Error::TrivialCharacter);
    }
    let mut report = CheckReport::new(format!("omega_sigma surjective (sigma = {sigma})"));
    let size = e.size();
    let image_exponent = if size <= ENUMERATION_LIMIT {
        let image: HashSet<Vec<u32>> =
            (0..size).into_par_iter().map(|c| omega_vector(e, w, sigma, p, &e.element(c))).collect();
        report.checked += size;
        let q = p.get() as usize;
        let exp = (0..=2 * w).find(|&k| q.pow(k as u32) == image.len());
        exp.ok_or_else(|| Error::Invalid(format!("image of size {} is not a p-power", image.len())))?
    } else {
        let vectors: Vec<Vec<u32>> = e.generators().iter().map(|g| omega_vector(e, w, sigma, p, g)).collect();
        report.checked += vectors.len() as u64;
        report.note("mode: generators");
        span_exponent(p, &vectors, 2 * w)?
    };
    let unit = |i: usize| {
        let mut v = vec![0; w];
        v[i] = 1;
        v
    };
    let phi_slice: Vec<Vec<u32>> = (0..w)
        .map(|i| omega_vector(e, w, sigma, p, &SemidirectElement { phi: unit(i), x: vec![0; w], c: 0 }))
        .collect();
    // phi_g(h) = -[g, h] on A_W, so the pairing term cancels.
    let g_slice: Vec<Vec<u32>> = (0..w)
        .map(|i| {
            let g = SemidirectElement { phi: vec![0; w], x: unit(i), c: 0 };
            let phi = (0..w)
                .map(|j| p.neg(e.commutator(&g, &SemidirectElement { phi: vec![0; w], x: unit(j), c: 0 }).c))
                .collect();
            omega_vector(e, w, sigma, p, &SemidirectElement { phi, x: unit(i), c: 0 })
        })
        .collect();
    let phi_slice_exponent = span_exponent(p, &phi_slice, 2 * w)?;
    let g_slice_exponent = span_exponent(p, &g_slice, 2 * w)?;
    let phi_only = phi_slice.iter().all(|v| v[..w].iter().all(|&x| x == 0));
    let g_only = g_slice.iter().all(|v| v[w..].iter().all(|&x| x == 0));
    report.record(phi_only && phi_slice_exponent == w, || "the phi slice is not {1} x dual".into());
    report.record(g_only && g_slice_exponent == w, || "the phi_g slice is not A_W x {1}".into());
    let surjective = image_exponent == 2 * w;
    report.record(surjective, || format!("image has size p^{image_exponent}, expected p^{}", 2 * w));
    Ok((
        report,
        OmegaImage { sigma, image_exponent, dual_exponent: 2 * w, phi_slice_exponent, g_slice_exponent, surjective },
    ))
}

/// `q -> (0, q)` is an injective homomorphism onto a normal subgroup, and `|E| = p^{2w+1}`.
pub fn verify_q_embedding(e: &Envelope) -> CheckReport {
    let mut report = CheckReport::new("Q embeds as a normal subgroup");
    let q = e.group();
    let w = q.window_size();
    let q_size = (q.p.get() as u64).pow(w as u32 + 1);
    let q_elem = |code: u64| {
        let d = digits(q.p, code, w + 1);
        QElem { x: d[..w].to_vec(), c: d[w] }
    };
    let enumerate = q_size * q_size <= 1 << 20;
    let codes: Vec<u64> = if enumerate { (0..q_size).collect() } else { (0..q_size.min(64)).collect() };
    for &a in &codes {
        for &b in &codes {
            let (g, h) = (q_elem(a), q_elem(b));
            let lhs = e.embed(&q.q_mul(&g, &h));
            let rhs = e.mul(&e.embed(&g), &e.embed(&h));
            report.record(lhs == rhs, || format!("embedding is not multiplicative at {g:?}, {h:?}"));
        }
        let g = e.embed(&q_elem(a));
        report.record(a == 0 || !g.is_identity(), || format!("{a} maps to the identity"));
        for s in e.generators() {
            let conj = e.mul(&e.mul(&s, &g), &e.inv(&s));
            report.record(conj.phi.iter().all(|&v| v == 0), || format!("conjugate of {g:?} by {s:?} leaves Q"));
        }
    }
    let (p, exp) = e.order();
    report.record(exp as usize == 2 * w + 1 && p == q.p, || "unexpected order".into());
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Prime;

    fn p(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    fn spec_example() -> FiniteWindowGroup {
        let q = p(2);
        let omega = CocycleSpec::eta(SigmaSeq::indicator(q, 1).unwrap()).unwrap();
        FiniteWindowGroup::from_cocycle(&omega, &CharacterSpec::delta(q, 1), vec![0, 2]).unwrap()
    }

    fn random_window(q: Prime, w: usize, seed: u64) -> FiniteWindowGroup {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let pairing = FpMatrix::from_fn(q, w, w, |_, _| rng.gen_range(0..q.get() as i64));
        FiniteWindowGroup::from_pairing(q, (0..w as i64).map(|i| 2 * i).collect(), pairing).unwrap()
    }

    /// Multiplication with one product deliberately altered.
    struct Corrupted {
        inner: Envelope,
        a: SemidirectElement,
        b: SemidirectElement,
    }

    impl FiniteGroup for Corrupted {
        type Elem = SemidirectElement;
        fn identity(&self) -> SemidirectElement {
            self.inner.identity()
        }
        fn mul(&self, g: &SemidirectElement, h: &SemidirectElement) -> SemidirectElement {
            let mut out = self.inner.mul(g, h);
            if *g == self.a && *h == self.b {
                out.x[0] = self.inner.group().modulus().add(out.x[0], 1);
            }
            out
        }
        fn inv(&self, g: &SemidirectElement) -> SemidirectElement {
            self.inner.inv(g)
        }
        fn order(&self) -> (Prime, u32) {
            self.inner.order()
        }
        fn element(&self, code: u64) -> SemidirectElement {
            self.inner.element(code)
        }
        fn generators(&self) -> Vec<SemidirectElement> {
            self.inner.generators()
        }
        fn designated_center(&self) -> Vec<SemidirectElement> {
            self.inner.designated_center()
        }
        fn in_designated_center(&self, g: &SemidirectElement) -> bool {
            self.inner.in_designated_center(g)
        }
    }

    #[test]
    fn window_group_json() {
        let g = spec_example();
        assert_eq!(g.pairing().to_rows(), vec![vec![0, 1], vec![0, 0]]);
        let json = serde_json::to_value(&g).unwrap();
        assert_eq!(json["basis"], serde_json::json!([0, 2]));
        assert_eq!(json["provenance"]["cocycle"], "eta_s");
        let back: FiniteWindowGroup = serde_json::from_value(json).unwrap();
        assert_eq!(back, g);
        let plain: FiniteWindowGroup =
            serde_json::from_str(r#"{"p":2,"basis":[0,2],"pairing":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(plain.commutator_pairing(&[1, 0], &[0, 1]), 0);
        assert!(serde_json::from_str::<FiniteWindowGroup>(r#"{"p":2,"basis":[0],"pairing":[[0,1],[1,0]]}"#).is_err());
    }

    #[test]
    fn q_is_a_group() {
        for (q, w, seed) in [(p(2), 2, 1), (p(3), 2, 2), (p(5), 1, 3)] {
            let g = random_window(q, w, seed);
            let n = (q.get() as u64).pow(w as u32 + 1);
            let elem = |code| {
                let d = digits(q, code, w + 1);
                QElem { x: d[..w].to_vec(), c: d[w] }
            };
            for a in 0..n {
                let x = elem(a);
                assert_eq!(g.q_mul(&x, &g.q_inv(&x)), g.q_identity());
                for b in 0..n {
                    for c in 0..n.min(9) {
                        let (y, z) = (elem(b), elem(c));
                        assert_eq!(g.q_mul(&g.q_mul(&x, &y), &z), g.q_mul(&x, &g.q_mul(&y, &z)));
                    }
                }
            }
        }
    }

    #[test]
    fn e_mul_examples_and_associativity() {
        let e = Envelope::new(spec_example());
        let id = e.identity();
        assert_eq!(e.size(), 32);
        let all: Vec<_> = (0..32).map(|c| e.element(c)).collect();
        for a in &all {
            assert_eq!(e.e_mul(&id, a).unwrap(), *a);
            assert_eq!(e.e_mul(a, &e.e_inv(a).unwrap()).unwrap(), id);
            for b in &all {
                if a.phi.iter().chain(&b.phi).all(|&v| v == 0) {
                    let plain = e.group().q_mul(&QElem { x: a.x.clone(), c: a.c }, &QElem { x: b.x.clone(), c: b.c });
                    assert_eq!(e.e_mul(a, b).unwrap(), e.embed(&plain));
                }
                for c in &all {
                    assert_eq!(e.mul(&e.mul(a, b), c), e.mul(a, &e.mul(b, c)));
                }
            }
        }
        let short = SemidirectElement { phi: vec![0], x: vec![0, 0], c: 0 };
        assert!(e.e_mul(&short, &id).is_err());
    }

    #[test]
    fn closed_commutator_matches_literal_product() {
        for (q, w, seed) in [(p(2), 2, 5), (p(2), 4, 6), (p(3), 2, 7), (p(3), 1, 8)] {
            let e = Envelope::new(random_window(q, w, seed));
            assert!(e.size() <= 1 << 9);
            for a in 0..e.size() {
                let g = e.element(a);
                assert!(e.e_commutator(&g, &g).unwrap().is_identity());
                for b in 0..e.size() {
                    let h = e.element(b);
                    assert_eq!(e.e_commutator(&g, &h).unwrap(), e.commutator(&g, &h));
                }
            }
        }
        let g = random_window(p(3), 2, 9);
        let e = Envelope::new(g.clone());
        let (x, y) = (vec![1, 2], vec![2, 1]);
        let plain = |x: &Vec<u32>| SemidirectElement { phi: vec![0, 0], x: x.clone(), c: 0 };
        assert_eq!(e.e_commutator(&plain(&x), &plain(&y)).unwrap().c, g.commutator_pairing(&x, &y));
    }

    #[test]
    fn class_two_examples() {
        let r = verify_class2_and_center(&Envelope::new(spec_example()));
        assert!(r.passed, "{r}");
        assert_eq!(r.checked, 32 * 32 + 2 * 32);

        let q = p(2);
        let abelian = Envelope::new(FiniteWindowGroup::from_pairing(q, vec![0, 1], FpMatrix::zeros(q, 2, 2)).unwrap());
        assert!(verify_class2_and_center(&abelian).passed);
        let phi = SemidirectElement { phi: vec![1, 0], x: vec![0, 0], c: 0 };
        let x = SemidirectElement { phi: vec![0, 0], x: vec![1, 0], c: 0 };
        assert_eq!(abelian.commutator(&phi, &x).c, 1);

        let big = Envelope::new(random_window(p(3), 4, 11));
        let r = verify_class2_and_center(&big);
        assert!(r.passed && r.notes[0].starts_with("mode: generators"), "{r}");
    }

    #[test]
    fn corrupted_product_is_caught() {
        let inner = Envelope::new(spec_example());
        let a = inner.element(5);
        let b = inner.element(18);
        let bad = Corrupted { inner, a, b };
        let r = verify_class2_and_center(&bad);
        assert!(!r.passed);
        assert!(r.counterexample.unwrap().contains("outside the designated center"));
    }

    #[test]
    fn omega_sigma_examples() {
        let q = p(2);
        let one = Envelope::new(FiniteWindowGroup::from_pairing(q, vec![0], FpMatrix::zeros(q, 1, 1)).unwrap());
        let (r, img) = omega_sigma_surjective(&one, 1, 1).unwrap();
        assert!(r.passed);
        assert_eq!((img.image_exponent, img.dual_exponent), (2, 2));
        assert!(omega_sigma_surjective(&one, 1, 2).is_err());

        for (q, w, seed) in [(p(2), 3, 13), (p(3), 2, 14), (p(3), 4, 15), (p(5), 2, 16)] {
            let e = Envelope::new(random_window(q, w, seed));
            for s in 1..q.get() {
                let (r, img) = omega_sigma_surjective(&e, w, s).unwrap();
                assert!(r.passed, "{r}");
                assert_eq!((img.phi_slice_exponent, img.g_slice_exponent), (w, w));
            }
        }
    }

    #[test]
    fn embedding_of_q() {
        for (q, w, seed) in [(p(2), 2, 17), (p(3), 2, 18)] {
            let r = verify_q_embedding(&Envelope::new(random_window(q, w, seed)));
            assert!(r.passed, "{r}");
        }
    }
}
