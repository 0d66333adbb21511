//! Rational self-maps of P^1(Q): canonical form, projective
//! evaluation, iteration, conjugation, ramification data, and divisor
//! pushforward.
//!
//! Infinity is handled by homogeneous evaluation and, where a local
//! computation is needed, by conjugating with x -> 1/x; the polynomial
//! layer below stays one-variable.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::qpoly::{
    compose, interpolate, poly_gcd, yun_decompose, SquarefreeDecomposition, UniPoly,
};

/// Point of P^1(Q) as a coprime integer pair (a : b) with b >= 0 and
/// (1 : 0) denoting infinity. Equal points have identical fields.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjectivePoint {
    a: BigInt,
    b: BigInt,
}

impl std::fmt::Debug for ProjectivePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self)
    }
}

impl std::fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_infinity() {
            write!(f, "inf")
        } else if self.b.is_one() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}/{}", self.a, self.b)
        }
    }
}

impl ProjectivePoint {
    pub fn new(a: BigInt, b: BigInt) -> Self {
        assert!(
            !(a.is_zero() && b.is_zero()),
            "(0 : 0) is not a projective point"
        );
        if b.is_zero() {
            return ProjectivePoint {
                a: BigInt::one(),
                b: BigInt::zero(),
            };
        }
        let mut g = a.gcd(&b);
        if b.is_negative() {
            g = -g;
        }
        ProjectivePoint {
            a: a / &g,
            b: b / &g,
        }
    }

    pub fn infinity() -> Self {
        ProjectivePoint {
            a: BigInt::one(),
            b: BigInt::zero(),
        }
    }

    pub fn from_rational(q: &BigRational) -> Self {
        ProjectivePoint::new(q.numer().clone(), q.denom().clone())
    }

    pub fn from_int(n: i64) -> Self {
        ProjectivePoint::new(BigInt::from(n), BigInt::one())
    }

    pub fn is_infinity(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero()
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        (!self.is_infinity()).then(|| BigRational::new(self.a.clone(), self.b.clone()))
    }

    /// Total bit size of both coordinates, for orbit budgets.
    pub fn bit_size(&self) -> u64 {
        self.a.bits() + self.b.bits()
    }
}

/// Degree budget for iteration; deg(phi^n) = d^n grows fast and the
/// coefficient mass grows with it, so runaway requests become typed
/// errors instead of stalls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterateBudget {
    pub max_degree: u64,
}

impl Default for IterateBudget {
    fn default() -> Self {
        IterateBudget { max_degree: 4096 }
    }
}

/// Degree-d rational self-map of P^1 in canonical form: numerator and
/// denominator are integer polynomials, coprime over Q, the pair of
/// contents is a reduced fraction, and the denominator has positive
/// leading coefficient (the sign lives in the numerator).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMap {
    num: UniPoly,
    den: UniPoly,
    degree: usize,
}

impl std::fmt::Debug for RationalMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self)
    }
}

impl std::fmt::Display for RationalMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// Homogeneous evaluation sum_i c_i num^i den^(d-i) of a polynomial at
/// a rational function, padded to total degree d >= deg(poly).
fn hom_compose(poly: &UniPoly, num: &UniPoly, den: &UniPoly, d: usize) -> UniPoly {
    let (n, _) = compose(poly, num, den);
    // compose pads to deg(poly); lift to d with extra den powers.
    n.mul(&den.pow((d - poly.deg()) as u32))
}

impl RationalMap {
    /// Canonicalize p/q. Cancels common factors, normalizes contents.
    pub fn new(p: &UniPoly, q: &UniPoly) -> Result<RationalMap> {
        if q.is_zero() || p.is_zero() {
            return Err(Error::ZeroMap);
        }
        let g = poly_gcd(p, q);
        let p = p.div_exact(&g);
        let q = q.div_exact(&g);
        let degree = p.deg().max(q.deg());
        if degree == 0 {
            return Err(Error::ConstantMap);
        }
        let (cp, pp) = p.integer_primitive();
        let (cq, qq) = q.integer_primitive();
        // cp/cq = sign * u/v in lowest terms.
        let c = cp / cq;
        let num = UniPoly::from_int_vec(pp)
            .scale(&BigRational::from(c.numer().clone()));
        let den = UniPoly::from_int_vec(qq)
            .scale(&BigRational::from(c.denom().clone()));
        Ok(RationalMap { num, den, degree })
    }

    /// The identity map x.
    pub fn identity() -> RationalMap {
        RationalMap {
            num: UniPoly::x(),
            den: UniPoly::one(),
            degree: 1,
        }
    }

    /// Polynomial map p(x)/1.
    pub fn from_polynomial(p: &UniPoly) -> Result<RationalMap> {
        RationalMap::new(p, &UniPoly::one())
    }

    /// Moebius map (a x + b) / (c x + d); requires ad - bc != 0.
    pub fn moebius(a: i64, b: i64, c: i64, d: i64) -> Result<RationalMap> {
        if a * d - b * c == 0 {
            return Err(Error::NotMoebius);
        }
        RationalMap::new(&UniPoly::from_ints(&[b, a]), &UniPoly::from_ints(&[d, c]))
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// phi(P) by homogeneous evaluation; always defined on P^1.
    pub fn eval(&self, point: &ProjectivePoint) -> ProjectivePoint {
        let d = self.degree;
        let mut u = BigInt::zero();
        let mut v = BigInt::zero();
        // a^i b^(d-i) weights
        let mut apow = vec![BigInt::one()];
        let mut bpow = vec![BigInt::one()];
        for i in 1..=d {
            let an = &apow[i - 1] * &point.a;
            apow.push(an);
            let bn = &bpow[i - 1] * &point.b;
            bpow.push(bn);
        }
        for i in 0..=d {
            let w = &apow[i] * &bpow[d - i];
            let nc = self.num.coeff(i);
            if !nc.is_zero() {
                u += nc.numer() * &w / nc.denom();
            }
            let dc = self.den.coeff(i);
            if !dc.is_zero() {
                v += dc.numer() * &w / dc.denom();
            }
        }
        ProjectivePoint::new(u, v)
    }

    /// phi(x) for rational x, as a point of P^1 (poles go to infinity).
    pub fn eval_rational(&self, x: &BigRational) -> ProjectivePoint {
        self.eval(&ProjectivePoint::from_rational(x))
    }

    /// Map composition self(other(x)), canonicalized.
    pub fn compose_map(&self, other: &RationalMap) -> Result<RationalMap> {
        let d = self.degree;
        let num = hom_compose(&self.num, &other.num, &other.den, d);
        let den = hom_compose(&self.den, &other.num, &other.den, d);
        RationalMap::new(&num, &den)
    }

    /// phi^n, with phi^0 = x. Error if d^n would exceed the budget.
    pub fn iterate(&self, n: u32, budget: &IterateBudget) -> Result<RationalMap> {
        let mut required: u64 = 1;
        for _ in 0..n {
            required = required.saturating_mul(self.degree as u64);
            if required > budget.max_degree {
                return Err(Error::DegreeBudget {
                    required,
                    budget: budget.max_degree,
                });
            }
        }
        let mut acc = RationalMap::identity();
        for _ in 0..n {
            acc = self.compose_map(&acc)?;
        }
        Ok(acc)
    }

    /// mu o phi o mu^(-1) for a Moebius mu.
    pub fn conjugate(&self, mu: &RationalMap) -> Result<RationalMap> {
        if mu.degree != 1 {
            return Err(Error::NotMoebius);
        }
        // mu = (a x + b)/(c x + d); inverse (d x - b)/(-c x + a).
        let a = mu.num.coeff(1);
        let b = mu.num.coeff(0);
        let c = mu.den.coeff(1);
        let d = mu.den.coeff(0);
        let inv = RationalMap::new(
            &UniPoly::from_coeffs(vec![-b, d]),
            &UniPoly::from_coeffs(vec![a, -c]),
        )?;
        mu.compose_map(&self.compose_map(&inv)?)
    }

    /// The conjugate 1/phi(1/x), which swaps the roles of 0 and infinity.
    pub fn conjugate_by_inversion(&self) -> RationalMap {
        let d = self.degree;
        let rev = |p: &UniPoly| {
            let mut c: Vec<BigRational> = (0..=d).map(|i| p.coeff(i)).collect();
            c.reverse();
            UniPoly::from_coeffs(c)
        };
        // Reversal of the degree-d homogenizations; coprimality is
        // preserved, so this cannot fail for a valid map.
        RationalMap::new(&rev(&self.den), &rev(&self.num)).expect("inversion of a valid map")
    }

    /// Numerator of phi - v (or the denominator for v = infinity): the
    /// polynomial whose roots, with multiplicity, are the finite
    /// preimages of v.
    pub fn preimage_poly(&self, v: &ProjectivePoint) -> UniPoly {
        if v.is_infinity() {
            self.den.clone()
        } else {
            self.num
                .scale(&BigRational::from(v.b.clone()))
                .sub(&self.den.scale(&BigRational::from(v.a.clone())))
        }
    }

    /// Ramification index e_phi(P) >= 1.
    pub fn ram_index_at(&self, point: &ProjectivePoint) -> u32 {
        if point.is_infinity() {
            return self
                .conjugate_by_inversion()
                .ram_index_at(&ProjectivePoint::new(BigInt::zero(), BigInt::one()));
        }
        let z = point.to_rational().unwrap();
        let v = self.eval(point);
        let p = self.preimage_poly(&v);
        p.valuation_at(&z)
    }

    /// Order of phi at infinity as a zero/pole: positive means a zero
    /// of that order, negative a pole, 0 neither.
    pub fn order_at_infinity(&self) -> i64 {
        self.den.deg() as i64 - self.num.deg() as i64
    }

    /// Finite critical data (Yun layers of the Wronskian p'q - pq';
    /// a root in layer e has ramification index e + 1) plus the
    /// ramification index at infinity.
    pub fn ramification(&self) -> RamificationDivisor {
        let w = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        assert!(!w.is_zero(), "constant map slipped through");
        let finite = yun_decompose(&w);
        let infinity_index = self.ram_index_at(&ProjectivePoint::infinity());
        let rd = RamificationDivisor {
            finite,
            infinity_index,
            degree: self.degree,
        };
        debug_assert!(rd.riemann_hurwitz_holds());
        rd
    }

    /// Zero/pole multiplicity data of phi as a function.
    pub fn zero_pole_profile(&self) -> ZeroPoleProfile {
        ZeroPoleProfile {
            zeros: yun_decompose(&self.num).factors,
            poles: yun_decompose(&self.den).factors,
            infinity_order: self.order_at_infinity(),
        }
    }

    /// Image of the root set of a squarefree polynomial: a monic
    /// squarefree polynomial whose roots are exactly the finite values
    /// phi(s), plus a flag when some root maps to infinity.
    ///
    /// Computed as the squarefree part of Res_y(S(y), p(y) - x q(y)),
    /// evaluated at deg(S)+1 sample points and interpolated.
    pub fn pushforward(&self, set: &UniPoly) -> (Option<UniPoly>, bool) {
        assert!(!set.is_zero() && !set.is_constant(), "pushforward needs a nonconstant set");
        let s = set.monic();
        let hits_infinity = !poly_gcd(&s, &self.den).is_constant();
        let samples = s.deg() + 1;
        let mut points = Vec::with_capacity(samples);
        for t in 0..samples {
            let tq = BigRational::from(BigInt::from(t as i64));
            let shifted = self.num.sub(&self.den.scale(&tq));
            let value = crate::qpoly::resultant(&s, &shifted);
            points.push((tq, value));
        }
        let r = interpolate(&points);
        if r.is_constant() {
            return (None, hits_infinity);
        }
        (Some(r.squarefree_part()), hits_infinity)
    }

    /// Rational fixed points, including infinity when fixed.
    pub fn rational_fixed_points(
        &self,
        budget: &crate::arith::FactorBudget,
    ) -> Result<Vec<ProjectivePoint>> {
        let fixed_poly = self.num.sub(&self.den.mul(&UniPoly::x()));
        let mut out = Vec::new();
        if !fixed_poly.is_zero() {
            for (root, _) in crate::qpoly::rational_roots(&fixed_poly, budget)? {
                out.push(ProjectivePoint::from_rational(&root));
            }
        }
        if self.eval(&ProjectivePoint::infinity()).is_infinity() {
            out.push(ProjectivePoint::infinity());
        }
        Ok(out)
    }
}

/// Wronskian layers plus the index at infinity. The Riemann-Hurwitz
/// identity sum_z (e_phi(z) - 1) = 2d - 2 is checkable exactly.
#[derive(Debug, Clone)]
pub struct RamificationDivisor {
    pub finite: SquarefreeDecomposition,
    pub infinity_index: u32,
    degree: usize,
}

impl RamificationDivisor {
    /// sum over finite layers of (multiplicity * layer degree) plus
    /// (e(inf) - 1); equals 2d - 2 exactly for every map.
    pub fn total_defect(&self) -> u64 {
        let finite: u64 = self
            .finite
            .factors
            .iter()
            .map(|(e, f)| u64::from(*e) * f.deg() as u64)
            .sum();
        finite + u64::from(self.infinity_index) - 1
    }

    pub fn riemann_hurwitz_holds(&self) -> bool {
        self.total_defect() == 2 * self.degree as u64 - 2
    }

    /// Finite critical points grouped as (ramification index, squarefree set).
    pub fn critical_sets(&self) -> Vec<(u32, UniPoly)> {
        self.finite
            .factors
            .iter()
            .map(|(e, f)| (e + 1, f.clone()))
            .collect()
    }
}

/// Zero and pole layers of a map, with the order at infinity kept
/// separate (positive = zero at infinity).
#[derive(Debug, Clone)]
pub struct ZeroPoleProfile {
    pub zeros: Vec<(u32, UniPoly)>,
    pub poles: Vec<(u32, UniPoly)>,
    pub infinity_order: i64,
}

impl ZeroPoleProfile {
    /// Signed multiplicity layers (exponent, number of distinct points),
    /// finite points only, as the superelliptic genus formula consumes.
    pub fn signed_layers(&self) -> Vec<(i64, usize)> {
        let mut out = Vec::new();
        for (e, f) in &self.zeros {
            out.push((i64::from(*e), f.deg()));
        }
        for (e, f) in &self.poles {
            out.push((-i64::from(*e), f.deg()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    /// phi_1 = -(x+3)^2 / (4x)
    fn phi1() -> RationalMap {
        RationalMap::new(
            &UniPoly::from_ints(&[-9, -6, -1]),
            &UniPoly::from_ints(&[0, 4]),
        )
        .unwrap()
    }

    #[test]
    fn make_map_canonicalizes() {
        // (2x^2 + 2) / (2x) -> (x^2 + 1)/x
        let m = RationalMap::new(
            &UniPoly::from_ints(&[2, 0, 2]),
            &UniPoly::from_ints(&[0, 2]),
        )
        .unwrap();
        assert_eq!(m.num(), &UniPoly::from_ints(&[1, 0, 1]));
        assert_eq!(m.den(), &UniPoly::from_ints(&[0, 1]));
        assert_eq!(m.degree(), 2);

        let m = phi1();
        assert_eq!(m.degree(), 2);
        assert_eq!(m.num(), &UniPoly::from_ints(&[-9, -6, -1]));
        assert_eq!(m.den(), &UniPoly::from_ints(&[0, 4]));

        // (x^2)/x -> x, degree 1
        let m = RationalMap::new(&UniPoly::from_ints(&[0, 0, 1]), &UniPoly::from_ints(&[0, 1]))
            .unwrap();
        assert_eq!(m, RationalMap::identity());

        // constants rejected
        assert!(RationalMap::new(&UniPoly::from_ints(&[0, 2]), &UniPoly::from_ints(&[0, 1]))
            .is_err());
    }

    #[test]
    fn eval_examples() {
        let m = phi1();
        assert_eq!(
            m.eval(&ProjectivePoint::from_int(-1)),
            ProjectivePoint::from_int(1)
        );
        assert_eq!(
            m.eval(&ProjectivePoint::from_int(0)),
            ProjectivePoint::infinity()
        );
        assert_eq!(
            m.eval(&ProjectivePoint::infinity()),
            ProjectivePoint::infinity()
        );
    }

    #[test]
    fn iterate_examples() {
        let m = phi1();
        let b = IterateBudget::default();
        // phi^2 = (x-3)^4 / (16 x (x+3)^2)
        let it = m.iterate(2, &b).unwrap();
        let num = UniPoly::from_ints(&[-3, 1]).pow(4);
        let den = UniPoly::from_ints(&[0, 16]).mul(&UniPoly::from_ints(&[3, 1]).pow(2));
        assert_eq!(it, RationalMap::new(&num, &den).unwrap());
        assert_eq!(it.degree(), 4);

        assert_eq!(m.iterate(0, &b).unwrap(), RationalMap::identity());

        let sq = RationalMap::from_polynomial(&UniPoly::from_ints(&[0, 0, 1])).unwrap();
        let it = sq.iterate(3, &b).unwrap();
        assert_eq!(it.num().deg(), 8);
        assert!(it.den().is_one());

        let tiny = IterateBudget { max_degree: 4 };
        assert!(matches!(
            m.iterate(3, &tiny),
            Err(Error::DegreeBudget { .. })
        ));
    }

    #[test]
    fn conjugate_examples() {
        let sq = RationalMap::from_polynomial(&UniPoly::from_ints(&[0, 0, 1])).unwrap();
        let inv = RationalMap::moebius(0, 1, 1, 0).unwrap(); // 1/x
        assert_eq!(sq.conjugate(&inv).unwrap(), sq);

        // mu(x) = x - 2 on x^2 - 2 gives x^2 + 4x
        let m = RationalMap::from_polynomial(&UniPoly::from_ints(&[-2, 0, 1])).unwrap();
        let mu = RationalMap::moebius(1, -2, 0, 1).unwrap();
        let c = m.conjugate(&mu).unwrap();
        assert_eq!(c.num(), &UniPoly::from_ints(&[0, 4, 1]));

        let id = RationalMap::identity();
        assert_eq!(m.conjugate(&id).unwrap(), m);

        // conjugate(conjugate(phi, mu), mu^-1) = phi
        let mu = RationalMap::moebius(2, 1, 1, 3).unwrap();
        let mu_inv = RationalMap::moebius(3, -1, -1, 2).unwrap();
        let once = phi1().conjugate(&mu).unwrap();
        assert_eq!(once.conjugate(&mu_inv).unwrap(), phi1());
    }

    #[test]
    fn ramification_examples() {
        let m = phi1();
        let r = m.ramification();
        assert!(r.riemann_hurwitz_holds());
        assert_eq!(r.infinity_index, 1);
        let crit = r.critical_sets();
        assert_eq!(crit.len(), 1);
        assert_eq!(crit[0].0, 2);
        assert_eq!(crit[0].1, UniPoly::from_ints(&[-9, 0, 1]));

        let cube = RationalMap::from_polynomial(&UniPoly::from_ints(&[0, 0, 0, 1])).unwrap();
        let r = cube.ramification();
        assert_eq!(r.infinity_index, 3);
        assert_eq!(r.critical_sets(), vec![(3, UniPoly::x())]);

        let cheb = RationalMap::from_polynomial(&UniPoly::from_ints(&[-2, 0, 1])).unwrap();
        let r = cheb.ramification();
        assert_eq!(r.infinity_index, 2);
        assert_eq!(r.critical_sets(), vec![(2, UniPoly::x())]);
    }

    #[test]
    fn ram_index_chain_rule() {
        let m = phi1();
        let p = ProjectivePoint::from_int(-3);
        assert_eq!(m.ram_index_at(&p), 2);
        assert_eq!(m.ram_index_at(&ProjectivePoint::from_int(5)), 1);
        let m2 = m.iterate(2, &IterateBudget::default()).unwrap();
        let img = m.eval(&p);
        assert_eq!(
            m2.ram_index_at(&p),
            m.ram_index_at(&img) * m.ram_index_at(&p)
        );
    }

    #[test]
    fn pushforward_examples() {
        let sq = RationalMap::from_polynomial(&UniPoly::from_ints(&[0, 0, 1])).unwrap();
        // x - 2 -> x - 4
        let (s, inf) = sq.pushforward(&UniPoly::from_ints(&[-2, 1]));
        assert_eq!(s.unwrap(), UniPoly::from_ints(&[-4, 1]));
        assert!(!inf);
        // x^2 - 2 -> x - 2 (both roots collapse)
        let (s, inf) = sq.pushforward(&UniPoly::from_ints(&[-2, 0, 1]));
        assert_eq!(s.unwrap(), UniPoly::from_ints(&[-2, 1]));
        assert!(!inf);
        // phi1 sends 0 to infinity only
        let (s, inf) = phi1().pushforward(&UniPoly::x());
        assert!(s.is_none());
        assert!(inf);
    }

    #[test]
    fn zero_pole_profile_examples() {
        let p = phi1().zero_pole_profile();
        assert_eq!(p.zeros, vec![(2, UniPoly::from_ints(&[3, 1]))]);
        assert_eq!(p.poles, vec![(1, UniPoly::x())]);
        assert_eq!(p.infinity_order, -1);

        let cube = RationalMap::from_polynomial(&UniPoly::from_ints(&[0, 0, 0, 1])).unwrap();
        let p = cube.zero_pole_profile();
        assert_eq!(p.zeros, vec![(3, UniPoly::x())]);
        assert!(p.poles.is_empty());
        assert_eq!(p.infinity_order, -3);
    }

    #[test]
    fn fixed_points() {
        let b = crate::arith::FactorBudget::default();
        let m = RationalMap::from_polynomial(&UniPoly::from_ints(&[0, 0, 1])).unwrap();
        let fixed = m.rational_fixed_points(&b).unwrap();
        assert_eq!(
            fixed,
            vec![
                ProjectivePoint::from_int(0),
                ProjectivePoint::from_int(1),
                ProjectivePoint::infinity()
            ]
        );
    }

    #[test]
    fn eval_with_rational_coefficients() {
        // phi = (x^2 + 1/2) / (x/3 - 1) canonicalizes to integer form
        let m = RationalMap::new(
            &UniPoly::from_coeffs(vec![BigRational::new(1.into(), 2.into()), q(0), q(1)]),
            &UniPoly::from_coeffs(vec![q(-1), BigRational::new(1.into(), 3.into())]),
        )
        .unwrap();
        // (2x^2 + 1) * 3 / (2 * (x - 3)): contents reduced jointly
        assert_eq!(
            m.eval(&ProjectivePoint::from_int(1)),
            ProjectivePoint::new(BigInt::from(-9), BigInt::from(4))
        );
    }
}
