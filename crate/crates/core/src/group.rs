//! Exact arithmetic in the central extension `G = A x_omega A`.
//!
//! Elements are pairs `(x, a)` with product
//! `(x, a)(y, b) = (x + y, a + b + omega(x, y))`. The second factor
//! `N = {(0, a)}` is central and `G/N` is identified with `A`.

use std::fmt;
use std::sync::Arc;

use crate::cocycle::{gw_commutator_closed_form, CocycleSpec, SigmaSeq};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::report::{CheckReport, ExponentWindow};

#[derive(Debug, Clone)]
pub struct CentralExtElement {
    x: LaurentPoly,
    a: LaurentPoly,
    omega: Arc<CocycleSpec>,
}

impl PartialEq for CentralExtElement {
    fn eq(&self, other: &Self) -> bool {
        self.x == other.x && self.a == other.a && same_cocycle(&self.omega, &other.omega)
    }
}

impl Eq for CentralExtElement {}

fn same_cocycle(a: &Arc<CocycleSpec>, b: &Arc<CocycleSpec>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl CentralExtElement {
    pub fn new(omega: Arc<CocycleSpec>, x: LaurentPoly, a: LaurentPoly) -> Result<Self> {
        let p = omega.modulus();
        for c in [&x, &a] {
            if c.modulus() != p {
                return Err(Error::ModulusMismatch(p.get(), c.modulus().get()));
            }
        }
        Ok(CentralExtElement { x, a, omega })
    }

    pub fn identity(omega: Arc<CocycleSpec>) -> Self {
        let p = omega.modulus();
        CentralExtElement { x: LaurentPoly::zero(p), a: LaurentPoly::zero(p), omega }
    }

    /// Lift `(x, 0)` of an element of `A`.
    pub fn lift(omega: Arc<CocycleSpec>, x: LaurentPoly) -> Result<Self> {
        let zero = LaurentPoly::zero(omega.modulus());
        Self::new(omega, x, zero)
    }

    /// Central element `(0, a)`.
    pub fn central(omega: Arc<CocycleSpec>, a: LaurentPoly) -> Result<Self> {
        let zero = LaurentPoly::zero(omega.modulus());
        Self::new(omega, zero, a)
    }

    pub fn x(&self) -> &LaurentPoly {
        &self.x
    }

    pub fn a(&self) -> &LaurentPoly {
        &self.a
    }

    pub fn cocycle(&self) -> &Arc<CocycleSpec> {
        &self.omega
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.a.is_zero()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_cocycle(&self.omega, &other.omega) {
            Ok(())
        } else {
            Err(Error::CocycleMismatch)
        }
    }

    fn with(&self, x: LaurentPoly, a: LaurentPoly) -> Self {
        CentralExtElement { x, a, omega: Arc::clone(&self.omega) }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let x = self.x.add(&other.x)?;
        let a = self.a.add(&other.a)?.add(&self.omega.eval(&self.x, &other.x)?)?;
        Ok(self.with(x, a))
    }

    /// `(x, a)^{-1} = (-x, -a - omega(x, -x))`.
    pub fn inverse(&self) -> Result<Self> {
        let neg_x = self.x.negate();
        let a = self.a.negate().sub(&self.omega.eval(&self.x, &neg_x)?)?;
        Ok(self.with(neg_x, a))
    }

    /// `[g, h] = g h g^{-1} h^{-1} = (0, omega(x, y) - omega(y, x))`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let c = self.omega.commutator(&self.x, &other.x)?;
        Ok(self.with(LaurentPoly::zero(self.x.modulus()), c))
    }

    /// The literal product `g h g^{-1} h^{-1}`.
    pub fn literal_commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.mul(&self.inverse()?)?.mul(&other.inverse()?)
    }

    pub fn pow(&self, n: u64) -> Result<Self> {
        let mut acc = Self::identity(Arc::clone(&self.omega));
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// The contraction: multiplication by `t` on `A` and by `t^w` on `N`,
    /// where `w` is the cocycle's shift weight (1 for `eta_s`, 2 for monomial
    /// commutation relations).
    pub fn alpha(&self) -> Result<Self> {
        let w = self.omega.shift_weight().ok_or(Error::UnsupportedCocycle("table cocycles have no canonical shift"))?;
        Ok(self.with(self.x.shift(1), self.a.shift(w)))
    }

    /// Splits `g` into `g_0 g_1` with `g_0` over the even exponents and `g_1`
    /// over the odd exponents of `x`. The central correction
    /// `omega(x_0, x_1)` is folded into `g_0`.
    pub fn split_even_odd(&self) -> Result<EvenOddSplit> {
        if !matches!(*self.omega, CocycleSpec::EtaS(_)) {
            return Err(Error::UnsupportedCocycle("even/odd splitting needs an eta_s cocycle"));
        }
        let x0 = self.x.filter(|m| m.rem_euclid(2) == 0);
        let x1 = self.x.filter(|m| m.rem_euclid(2) == 1);
        let defect = self.omega.eval(&x0, &x1)?;
        let even = self.with(x0, self.a.sub(&defect)?);
        let odd = self.with(x1, LaurentPoly::zero(self.x.modulus()));
        let parts_commute = even.commutator(&odd)?.is_identity();
        let reassembles = even.mul(&odd)? == *self;
        Ok(EvenOddSplit { even, odd, defect, parts_commute, reassembles })
    }
}

impl fmt::Display for CentralExtElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} | {})", self.x, self.a)
    }
}

/// Result of [`CentralExtElement::split_even_odd`].
#[derive(Debug, Clone)]
pub struct EvenOddSplit {
    pub even: CentralExtElement,
    pub odd: CentralExtElement,
    /// `omega(x_0, x_1)`, already subtracted from `even`'s central coordinate.
    pub defect: LaurentPoly,
    pub parts_commute: bool,
    pub reassembles: bool,
}

/// Compares three computations of `[t^a, t^b]` for every pair of exponents in `window`:
/// the closed form, `eta_s(x, y) - eta_s(y, x)`, and the literal product `g h g^-1 h^-1`.
pub fn verify_commutator_oracles(s: &SigmaSeq, window: ExponentWindow) -> Result<CheckReport> {
    let omega = Arc::new(CocycleSpec::eta(s.clone())?);
    let p = s.modulus();
    let mut report = CheckReport::new(format!("commutator oracles for eta_s[{s}]"));
    for a in window.exponents() {
        for b in window.exponents() {
            let (x, y) = (LaurentPoly::t_pow(p, a), LaurentPoly::t_pow(p, b));
            let closed = gw_commutator_closed_form(s, a, b)?;
            let anti = omega.commutator(&x, &y)?;
            let g = CentralExtElement::lift(Arc::clone(&omega), x)?;
            let h = CentralExtElement::lift(Arc::clone(&omega), y)?;
            let lit = g.literal_commutator(&h)?;
            let ok = lit.x().is_zero() && closed == anti && anti == *lit.a();
            report
                .record(ok, || format!("[t^{a}, t^{b}]: closed form {closed}, antisymmetrized {anti}, literal {lit}"));
        }
    }
    Ok(report)
}

/// Parses the element text form `"(x | a)"`.
pub fn parse_element(omega: Arc<CocycleSpec>, text: &str) -> Result<CentralExtElement> {
    let p = omega.modulus();
    let inner = text
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("expected (x | a), got {text:?}")))?;
    let (x, a) = inner.split_once('|').ok_or_else(|| Error::Parse(format!("missing '|' in {text:?}")))?;
    CentralExtElement::new(omega, LaurentPoly::parse(p, x)?, LaurentPoly::parse(p, a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::CocycleTable;
    use crate::laurent::Valuation;
    use crate::linalg::Prime;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    fn eta(q: Prime, prefix: &[i64], period: &[i64]) -> Arc<CocycleSpec> {
        Arc::new(CocycleSpec::eta(SigmaSeq::binary(q, prefix, period).unwrap()).unwrap())
    }

    fn t(q: Prime, m: i64) -> LaurentPoly {
        LaurentPoly::t_pow(q, m)
    }

    fn random_elem(rng: &mut ChaCha8Rng, omega: &Arc<CocycleSpec>) -> CentralExtElement {
        let q = omega.modulus();
        let poly = |rng: &mut ChaCha8Rng| {
            LaurentPoly::from_terms(q, (0..4).map(|_| (rng.gen_range(-6..=6), rng.gen_range(0..q.get()) as i64)))
        };
        let x = poly(rng);
        let a = poly(rng);
        CentralExtElement::new(Arc::clone(omega), x, a).unwrap()
    }

    fn cocycles() -> Vec<Arc<CocycleSpec>> {
        vec![
            eta(p(2), &[1], &[0]),
            eta(p(3), &[1, 1, 1], &[0, 1]),
            eta(p(2), &[], &[1]),
            Arc::new(CocycleSpec::MonomialGamma(SigmaSeq::new(p(3), &[1, 2], &[1, 0]).unwrap())),
            Arc::new(CocycleSpec::MonomialGamma(SigmaSeq::new(p(2), &[], &[1]).unwrap())),
        ]
    }

    #[test]
    fn product_example() {
        let q = p(2);
        let omega = eta(q, &[1], &[0]);
        let g = CentralExtElement::lift(Arc::clone(&omega), t(q, 0)).unwrap();
        let h = CentralExtElement::lift(Arc::clone(&omega), t(q, 2)).unwrap();
        let gh = g.mul(&h).unwrap();
        assert_eq!(gh.x(), &t(q, 0).add(&t(q, 2)).unwrap());
        assert_eq!(gh.a(), &t(q, 1));
        assert_eq!(g.mul(&CentralExtElement::identity(omega)).unwrap(), g);
    }

    #[test]
    fn group_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for omega in cocycles() {
            let e = CentralExtElement::identity(Arc::clone(&omega));
            for _ in 0..200 {
                let (g, h, k) =
                    (random_elem(&mut rng, &omega), random_elem(&mut rng, &omega), random_elem(&mut rng, &omega));
                assert_eq!(g.mul(&h).unwrap().mul(&k).unwrap(), g.mul(&h.mul(&k).unwrap()).unwrap());
                assert_eq!(g.mul(&g.inverse().unwrap()).unwrap(), e);
                assert_eq!(g.inverse().unwrap().mul(&g).unwrap(), e);
                assert_eq!(e.mul(&g).unwrap(), g);
            }
        }
    }

    #[test]
    fn commutator_examples() {
        let q = p(2);
        let omega = eta(q, &[1], &[0]);
        let g = CentralExtElement::lift(Arc::clone(&omega), t(q, 0)).unwrap();
        let h = CentralExtElement::lift(Arc::clone(&omega), t(q, 2)).unwrap();
        assert!(g.commutator(&g).unwrap().is_identity());
        let c = g.commutator(&h).unwrap();
        assert!(c.x().is_zero());
        assert_eq!(c.a(), &t(q, 1));
    }

    #[test]
    fn closed_form_commutator_matches_literal_product() {
        for omega in cocycles() {
            let q = omega.modulus();
            for a in -5..=5 {
                for b in -5..=5 {
                    let g = CentralExtElement::lift(Arc::clone(&omega), t(q, a)).unwrap();
                    let h = CentralExtElement::lift(Arc::clone(&omega), t(q, b)).unwrap();
                    assert_eq!(g.commutator(&h).unwrap(), g.literal_commutator(&h).unwrap());
                    if let CocycleSpec::EtaS(s) = &*omega {
                        assert_eq!(g.commutator(&h).unwrap().a(), &gw_commutator_closed_form(s, a, b).unwrap());
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for omega in cocycles() {
            for _ in 0..100 {
                let (g, h) = (random_elem(&mut rng, &omega), random_elem(&mut rng, &omega));
                assert_eq!(g.commutator(&h).unwrap(), g.literal_commutator(&h).unwrap());
            }
        }
    }

    #[test]
    fn center_and_exponent() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for omega in cocycles() {
            let q = omega.modulus().get() as u64;
            for _ in 0..50 {
                let g = random_elem(&mut rng, &omega);
                let n = CentralExtElement::central(Arc::clone(&omega), g.a().clone()).unwrap();
                let h = random_elem(&mut rng, &omega);
                assert!(n.commutator(&h).unwrap().is_identity());
                assert!(n.pow(q).unwrap().is_identity());
                assert!(g.pow(q * q).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn alpha_examples_and_automorphism() {
        let q = p(2);
        let omega = eta(q, &[1], &[0]);
        assert!(CentralExtElement::identity(Arc::clone(&omega)).alpha().unwrap().is_identity());
        let g = CentralExtElement::new(Arc::clone(&omega), t(q, 0), t(q, -1)).unwrap();
        let ag = g.alpha().unwrap();
        assert_eq!((ag.x(), ag.a()), (&t(q, 1), &t(q, 0)));
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for omega in cocycles() {
            for _ in 0..100 {
                let (g, h) = (random_elem(&mut rng, &omega), random_elem(&mut rng, &omega));
                assert_eq!(g.mul(&h).unwrap().alpha().unwrap(), g.alpha().unwrap().mul(&h.alpha().unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn alpha_rejects_tables() {
        let q = p(2);
        let base = CocycleSpec::eta(SigmaSeq::indicator(q, 1).unwrap()).unwrap();
        let omega = Arc::new(CocycleSpec::Table(CocycleTable::from_spec(&base, &[0, 2]).unwrap()));
        let g = CentralExtElement::lift(omega, t(q, 0)).unwrap();
        assert!(matches!(g.alpha(), Err(Error::UnsupportedCocycle(_))));
    }

    #[test]
    fn alpha_is_contractive() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for omega in cocycles() {
            let g = random_elem(&mut rng, &omega);
            for k in [0i64, 5, 20] {
                let mut h = g.clone();
                let mut n = 0;
                while !(h.x().valuation() > Valuation::Finite(k) && h.a().valuation() > Valuation::Finite(k)) {
                    h = h.alpha().unwrap();
                    n += 1;
                    assert!(n < 100);
                }
            }
        }
    }

    #[test]
    fn split_even_odd_examples() {
        let q = p(2);
        let omega = eta(q, &[1], &[0]);
        let g = CentralExtElement::new(Arc::clone(&omega), t(q, 0).add(&t(q, 4)).unwrap(), t(q, 3)).unwrap();
        let s = g.split_even_odd().unwrap();
        assert_eq!(s.even, g);
        assert!(s.odd.is_identity());

        let g = CentralExtElement::lift(Arc::clone(&omega), t(q, 0).add(&t(q, 1)).unwrap()).unwrap();
        let s = g.split_even_odd().unwrap();
        assert_eq!(s.even.x(), &t(q, 0));
        assert_eq!(s.odd.x(), &t(q, 1));
        assert!(s.reassembles && s.parts_commute);
        assert_eq!(s.even.mul(&s.odd).unwrap(), g);

        let mono = Arc::new(CocycleSpec::MonomialGamma(SigmaSeq::indicator(q, 1).unwrap()));
        assert!(CentralExtElement::lift(mono, t(q, 0)).unwrap().split_even_odd().is_err());
    }

    #[test]
    fn even_and_odd_parts_always_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for omega in cocycles().into_iter().filter(|o| matches!(**o, CocycleSpec::EtaS(_))) {
            for _ in 0..100 {
                let g = random_elem(&mut rng, &omega);
                let s = g.split_even_odd().unwrap();
                assert!(s.parts_commute && s.reassembles);
                let h = random_elem(&mut rng, &omega);
                let h_odd = h.split_even_odd().unwrap().odd;
                assert!(s.even.commutator(&h_odd).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn element_text_form() {
        let q = p(3);
        let omega = eta(q, &[1], &[0]);
        let g = parse_element(Arc::clone(&omega), "(t^0 + 2*t^2 | t^-1)").unwrap();
        assert_eq!(g.to_string(), "(1 + 2*t^2 | t^-1)");
        assert_eq!(parse_element(Arc::clone(&omega), &g.to_string()).unwrap(), g);
        assert!(parse_element(omega, "t^0 | 0").is_err());
    }

    #[test]
    fn mismatched_cocycles_are_rejected() {
        let q = p(2);
        let g = CentralExtElement::lift(eta(q, &[1], &[0]), t(q, 0)).unwrap();
        let h = CentralExtElement::lift(eta(q, &[0, 1], &[0]), t(q, 0)).unwrap();
        assert_eq!(g.mul(&h), Err(Error::CocycleMismatch));
        assert!(CentralExtElement::lift(eta(q, &[1], &[0]), t(p(3), 0)).is_err());
    }

    #[test]
    fn commutator_oracles_agree() {
        for q in [p(2), p(3)] {
            let s = SigmaSeq::new(q, &[1, 0, 1], &[0, 1]).unwrap();
            let r = verify_commutator_oracles(&s, ExponentWindow::new(-4, 4).unwrap()).unwrap();
            assert!(r.passed && r.checked == 81, "{r}");
        }
        assert!(verify_commutator_oracles(
            &SigmaSeq::new(p(3), &[2], &[0]).unwrap(),
            ExponentWindow::new(0, 1).unwrap()
        )
        .is_err());
    }
}
