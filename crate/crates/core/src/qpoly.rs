//! Dense univariate polynomials over Q.
//!
//! Exact gcd (subresultant pseudo-remainder sequence on primitive
//! integer parts), Yun squarefree decomposition, resultants via
//! fraction-free elimination, composition with rational-function
//! arguments, complete rational root finding, and coprime bases of
//! squarefree families.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{factor_integer, FactorBudget};
use crate::error::Result;

/// Dense polynomial over Q, coefficients lowest degree first, trimmed
/// so the leading coefficient is nonzero (empty vector = zero).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UniPoly {
    coeffs: Vec<BigRational>,
}

impl std::fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "UniPoly({})", self)
    }
}

impl std::fmt::Display for UniPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_coeff = mag.is_one() && i > 0;
            if !unit_coeff {
                if mag.denom().is_one() {
                    write!(f, "{}", mag.numer())?;
                } else {
                    write!(f, "{}/{}", mag.numer(), mag.denom())?;
                }
                if i > 0 {
                    write!(f, "*")?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{}", i)?,
            }
        }
        Ok(())
    }
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UniPoly::constant(BigRational::one())
    }

    /// The polynomial x.
    pub fn x() -> Self {
        UniPoly {
            coeffs: vec![BigRational::zero(), BigRational::one()],
        }
    }

    pub fn constant(c: BigRational) -> Self {
        UniPoly { coeffs: vec![c] }.trimmed()
    }

    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        UniPoly { coeffs }.trimmed()
    }

    /// Convenience constructor from integer coefficients, lowest first.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        UniPoly {
            coeffs: coeffs
                .iter()
                .map(|&c| BigRational::from(BigInt::from(c)))
                .collect(),
        }
        .trimmed()
    }

    /// c * x^k.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = c;
        UniPoly { coeffs }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with deg(0) = 0, for callers that have excluded zero.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i) + other.coeff(i));
        }
        UniPoly { coeffs }.trimmed()
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i) - other.coeff(i));
        }
        UniPoly { coeffs }.trimmed()
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        UniPoly { coeffs }.trimmed()
    }

    pub fn scale(&self, c: &BigRational) -> UniPoly {
        if c.is_zero() {
            return UniPoly::zero();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> UniPoly {
        let mut base = self.clone();
        let mut acc = UniPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        UniPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from(BigInt::from(i)))
                .collect(),
        }
        .trimmed()
    }

    /// Euclidean division over Q: self = q*d + r with deg r < deg d.
    pub fn divrem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.deg();
        let dl = d.leading();
        let mut rem = self.coeffs.clone();
        let qlen = self.coeffs.len().saturating_sub(dd);
        let mut quot = vec![BigRational::zero(); qlen.max(1)];
        loop {
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
            if rem.len() <= dd {
                break;
            }
            let shift = rem.len() - 1 - dd;
            let factor = rem.last().unwrap() / &dl;
            quot[shift] = factor.clone();
            for (j, c) in d.coeffs.iter().enumerate() {
                let t = &factor * c;
                rem[shift + j] -= t;
            }
            rem.pop();
        }
        (
            UniPoly { coeffs: quot }.trimmed(),
            UniPoly { coeffs: rem }.trimmed(),
        )
    }

    /// Exact division; panics if the division leaves a remainder.
    pub fn div_exact(&self, d: &UniPoly) -> UniPoly {
        let (q, r) = self.divrem(d);
        assert!(r.is_zero(), "div_exact: nonzero remainder");
        q
    }

    /// Divide the leading coefficient out. Zero stays zero.
    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let l = self.leading();
        self.scale(&l.recip())
    }

    /// Write self = content * primitive where primitive has coprime
    /// integer coefficients and positive leading coefficient.
    pub fn integer_primitive(&self) -> (BigRational, Vec<BigInt>) {
        if self.is_zero() {
            return (BigRational::zero(), Vec::new());
        }
        let mut den_lcm = BigInt::one();
        for c in &self.coeffs {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den_lcm / c.denom()))
            .collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        if ints.last().unwrap().is_negative() {
            g = -g;
        }
        let prim: Vec<BigInt> = ints.iter().map(|c| c / &g).collect();
        (BigRational::new(g, den_lcm), prim)
    }

    pub(crate) fn from_int_vec(v: Vec<BigInt>) -> UniPoly {
        UniPoly {
            coeffs: v.into_iter().map(BigRational::from).collect(),
        }
        .trimmed()
    }

    /// Product of the distinct irreducible factors, monic.
    pub fn squarefree_part(&self) -> UniPoly {
        assert!(!self.is_zero());
        if self.is_constant() {
            return UniPoly::one();
        }
        let g = poly_gcd(self, &self.derivative());
        self.div_exact(&g).monic()
    }

    /// Order of vanishing at a rational point.
    pub fn valuation_at(&self, x: &BigRational) -> u32 {
        assert!(!self.is_zero());
        let lin = UniPoly::from_coeffs(vec![-x.clone(), BigRational::one()]);
        let mut v = 0;
        let mut cur = self.clone();
        loop {
            let (q, r) = cur.divrem(&lin);
            if !r.is_zero() {
                return v;
            }
            v += 1;
            cur = q;
        }
    }
}

// ---------------------------------------------------------------------------
// gcd

fn int_deg(p: &[BigInt]) -> usize {
    p.len().saturating_sub(1)
}

fn int_trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// lc(g)^(deg f - deg g + 1) * f mod g, computed without fractions.
fn pseudo_rem(f: &[BigInt], g: &[BigInt]) -> Vec<BigInt> {
    let dg = int_deg(g);
    let lg = g.last().unwrap().clone();
    let delta = int_deg(f) - dg;
    let mut r = f.to_vec();
    let mut steps = 0u32;
    loop {
        int_trim(&mut r);
        if r.len() <= dg {
            break;
        }
        steps += 1;
        let shift = r.len() - 1 - dg;
        let cf = r.last().unwrap().clone();
        for c in r.iter_mut() {
            *c *= &lg;
        }
        for (j, gc) in g.iter().enumerate() {
            let t = &cf * gc;
            r[shift + j] -= t;
        }
        int_trim(&mut r);
    }
    // Pad the multiplier to exactly lc(g)^(delta+1).
    let missing = (delta as u32 + 1).saturating_sub(steps);
    if missing > 0 && !r.is_empty() {
        let pad = lg.pow(missing);
        for c in r.iter_mut() {
            *c *= &pad;
        }
    }
    r
}

fn int_primitive(mut p: Vec<BigInt>) -> Vec<BigInt> {
    int_trim(&mut p);
    if p.is_empty() {
        return p;
    }
    let mut g = BigInt::zero();
    for c in &p {
        g = g.gcd(c);
    }
    if p.last().unwrap().is_negative() {
        g = -g;
    }
    for c in p.iter_mut() {
        *c = &*c / &g;
    }
    p
}

/// Monic gcd over Q, subresultant PRS on primitive integer parts.
pub fn poly_gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let (_, pa) = a.integer_primitive();
    let (_, pb) = b.integer_primitive();
    let (mut f, mut g) = if int_deg(&pa) >= int_deg(&pb) {
        (pa, pb)
    } else {
        (pb, pa)
    };
    let mut gamma = BigInt::one();
    let mut h = BigInt::one();
    loop {
        if g.is_empty() {
            return UniPoly::from_int_vec(int_primitive(f)).monic();
        }
        if int_deg(&g) == 0 {
            return UniPoly::one();
        }
        let delta = (int_deg(&f) - int_deg(&g)) as u32;
        let mut r = pseudo_rem(&f, &g);
        let divisor = &gamma * h.pow(delta);
        for c in r.iter_mut() {
            *c = &*c / &divisor;
        }
        f = g;
        g = r;
        gamma = f.last().unwrap().clone();
        h = if delta == 0 {
            h
        } else {
            gamma.pow(delta) / h.pow(delta - 1)
        };
    }
}

// ---------------------------------------------------------------------------
// resultant

fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, r);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m.pop().unwrap().pop().unwrap();
    if sign {
        -d
    } else {
        d
    }
}

fn sylvester_det(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let da = int_deg(a);
    let db = int_deg(b);
    let n = da + db;
    if n == 0 {
        return BigInt::one();
    }
    let mut m = vec![vec![BigInt::zero(); n]; n];
    // db rows of a's coefficients (highest degree first), then da rows of b's.
    for row in 0..db {
        for (k, c) in a.iter().rev().enumerate() {
            m[row][row + k] = c.clone();
        }
    }
    for row in 0..da {
        for (k, c) in b.iter().rev().enumerate() {
            m[db + row][row + k] = c.clone();
        }
    }
    bareiss_det(m)
}

/// Resultant over Q with the convention
/// res(a, b) = lc(a)^deg(b) * prod b(alpha) over the roots alpha of a,
/// so res(x - 2, x^2 - 5) = -1. Zero iff a and b share a root in the
/// algebraic closure; res(a, b) = 0 whenever either argument is zero.
pub fn resultant(a: &UniPoly, b: &UniPoly) -> BigRational {
    if a.is_zero() || b.is_zero() {
        return BigRational::zero();
    }
    let (ca, pa) = a.integer_primitive();
    let (cb, pb) = b.integer_primitive();
    let da = a.deg() as u32;
    let db = b.deg() as u32;
    let mut scale = BigRational::one();
    for _ in 0..db {
        scale *= &ca;
    }
    for _ in 0..da {
        scale *= &cb;
    }
    scale * BigRational::from(sylvester_det(&pa, &pb))
}

// ---------------------------------------------------------------------------
// Yun squarefree decomposition

/// p = content * prod factor_i^multiplicity_i with the factors monic,
/// squarefree, nonconstant and pairwise coprime; multiplicities are
/// strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquarefreeDecomposition {
    pub content: BigRational,
    pub factors: Vec<(u32, UniPoly)>,
}

impl SquarefreeDecomposition {
    pub fn reassemble(&self) -> UniPoly {
        let mut acc = UniPoly::constant(self.content.clone());
        for (e, f) in &self.factors {
            acc = acc.mul(&f.pow(*e));
        }
        acc
    }

    /// (multiplicity, number of distinct points in the algebraic
    /// closure carrying it), one entry per Yun layer.
    pub fn multiplicities(&self) -> Vec<(u32, usize)> {
        self.factors.iter().map(|(e, f)| (*e, f.deg())).collect()
    }
}

/// Yun's algorithm over Q.
pub fn yun_decompose(p: &UniPoly) -> SquarefreeDecomposition {
    assert!(!p.is_zero(), "yun_decompose: zero polynomial");
    if p.is_constant() {
        return SquarefreeDecomposition {
            content: p.coeff(0),
            factors: Vec::new(),
        };
    }
    let deriv = p.derivative();
    let g = poly_gcd(p, &deriv);
    let mut w = p.div_exact(&g).monic();
    let mut y = deriv.div_exact(&g).scale(&p.leading().recip());
    let mut z = y.sub(&w.derivative());
    let mut factors = Vec::new();
    let mut i = 1u32;
    while !w.is_constant() {
        let h = poly_gcd(&w, &z);
        if !h.is_constant() {
            factors.push((i, h.clone()));
        }
        w = w.div_exact(&h).monic();
        y = z.div_exact(&h);
        z = y.sub(&w.derivative());
        i += 1;
    }
    let mut prod = UniPoly::one();
    for (e, f) in &factors {
        prod = prod.mul(&f.pow(*e));
    }
    let content_poly = p.div_exact(&prod);
    assert!(
        content_poly.is_constant(),
        "yun_decompose: non-constant content remainder"
    );
    SquarefreeDecomposition {
        content: content_poly.coeff(0),
        factors,
    }
}

// ---------------------------------------------------------------------------
// composition

/// Numerator and denominator of outer(num/den), not normalized:
/// (sum_i c_i num^i den^(D-i), den^D) with D = deg outer.
pub fn compose(outer: &UniPoly, inner_num: &UniPoly, inner_den: &UniPoly) -> (UniPoly, UniPoly) {
    assert!(!inner_den.is_zero(), "compose: zero inner denominator");
    if outer.is_zero() {
        return (UniPoly::zero(), UniPoly::one());
    }
    let d = outer.deg();
    let mut num_powers = Vec::with_capacity(d + 1);
    let mut den_powers = Vec::with_capacity(d + 1);
    let mut acc_n = UniPoly::one();
    let mut acc_d = UniPoly::one();
    for _ in 0..=d {
        num_powers.push(acc_n.clone());
        den_powers.push(acc_d.clone());
        acc_n = acc_n.mul(inner_num);
        acc_d = acc_d.mul(inner_den);
    }
    let mut num = UniPoly::zero();
    for i in 0..=d {
        let c = outer.coeff(i);
        if c.is_zero() {
            continue;
        }
        num = num.add(&num_powers[i].mul(&den_powers[d - i]).scale(&c));
    }
    (num, den_powers[d].clone())
}

/// Lagrange interpolation through distinct sample points.
pub fn interpolate(points: &[(BigRational, BigRational)]) -> UniPoly {
    let mut acc = UniPoly::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut basis = UniPoly::one();
        let mut denom = BigRational::one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            basis = basis.mul(&UniPoly::from_coeffs(vec![-xj.clone(), BigRational::one()]));
            denom *= xi - xj;
        }
        acc = acc.add(&basis.scale(&(yi / denom)));
    }
    acc
}

// ---------------------------------------------------------------------------
// rational roots

fn divisors_of(n: &BigInt, budget: &FactorBudget) -> Result<Vec<BigInt>> {
    let factors = factor_integer(n, budget)?;
    let mut divs = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut acc = d.clone();
            next.push(acc.clone());
            for _ in 0..e {
                acc = &acc * &p;
                next.push(acc.clone());
            }
        }
        divs = next;
    }
    Ok(divs)
}

/// All rational roots with multiplicities, complete over Q.
///
/// Candidates are read off the divisors of the leading and trailing
/// integer coefficients of each squarefree Yun factor, so the only
/// failure mode is an exhausted factorization budget.
pub fn rational_roots(p: &UniPoly, budget: &FactorBudget) -> Result<Vec<(BigRational, u32)>> {
    assert!(!p.is_zero(), "rational_roots: zero polynomial");
    let mut roots = Vec::new();
    for (mult, factor) in yun_decompose(p).factors {
        let (_, mut prim) = factor.integer_primitive();
        // Strip the root at zero.
        let mut shift = 0;
        while prim.first().is_some_and(|c| c.is_zero()) {
            prim.remove(0);
            shift += 1;
        }
        if shift > 0 {
            roots.push((BigRational::zero(), mult));
        }
        if int_deg(&prim) == 0 {
            continue;
        }
        let trailing = prim.first().unwrap().clone();
        let leading = prim.last().unwrap().clone();
        let f = UniPoly::from_int_vec(prim);
        let denominators = divisors_of(&leading, budget)?;
        for num in divisors_of(&trailing, budget)? {
            for den in &denominators {
                if !num.gcd(den).is_one() {
                    continue;
                }
                for cand in [
                    BigRational::new(num.clone(), den.clone()),
                    BigRational::new(-num.clone(), den.clone()),
                ] {
                    if f.eval(&cand).is_zero() {
                        roots.push((cand, mult));
                    }
                }
            }
        }
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    roots.dedup();
    Ok(roots)
}

/// Rational roots of a polynomial of degree <= 2, without any integer
/// factorization (linear formula / quadratic discriminant). None for
/// higher degrees.
pub fn low_degree_rational_roots(p: &UniPoly) -> Option<Vec<BigRational>> {
    match p.degree() {
        None | Some(0) => Some(Vec::new()),
        Some(1) => Some(vec![-p.coeff(0) / p.coeff(1)]),
        Some(2) => {
            let a = p.coeff(2);
            let b = p.coeff(1);
            let c = p.coeff(0);
            let disc = &b * &b - BigRational::from(BigInt::from(4)) * &a * &c;
            let mut out = Vec::new();
            if let Some(root) = crate::arith::mth_root_rational(&disc, 2) {
                let two_a = BigRational::from(BigInt::from(2)) * &a;
                out.push((-&b + &root) / &two_a);
                if !root.is_zero() {
                    out.push((-&b - &root) / &two_a);
                }
                out.sort();
            }
            Some(out)
        }
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// coprime basis

/// Pairwise-coprime monic squarefree basis such that every (squarefree)
/// input is a product of basis elements.
pub fn coprime_basis(polys: &[UniPoly]) -> Vec<UniPoly> {
    let mut basis: Vec<UniPoly> = Vec::new();
    for p in polys {
        let mut f = p.monic();
        let mut i = 0;
        while i < basis.len() {
            if f.is_constant() {
                break;
            }
            let g = poly_gcd(&f, &basis[i]);
            if g.is_constant() {
                i += 1;
                continue;
            }
            if g == basis[i] {
                f = f.div_exact(&g).monic();
                i += 1;
            } else {
                let b = basis.remove(i);
                basis.insert(i, g.clone());
                basis.insert(i + 1, b.div_exact(&g).monic());
                // Re-examine position i: f is still divisible by g.
            }
        }
        if !f.is_constant() && !f.is_zero() {
            basis.push(f);
        }
    }
    basis.sort_by(|a, b| a.deg().cmp(&b.deg()).then_with(|| a.coeffs.cmp(&b.coeffs)));
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    fn qq(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn gcd_examples() {
        // (x^2 - 1, x - 1) -> x - 1
        let a = UniPoly::from_ints(&[-1, 0, 1]);
        let b = UniPoly::from_ints(&[-1, 1]);
        assert_eq!(poly_gcd(&a, &b), b);
        // (x^2 + 1, x^2 + 2) -> 1
        let a = UniPoly::from_ints(&[1, 0, 1]);
        let b = UniPoly::from_ints(&[2, 0, 1]);
        assert!(poly_gcd(&a, &b).is_one());
        // ((x+3)^2, 4x) -> 1
        let a = UniPoly::from_ints(&[9, 6, 1]);
        let b = UniPoly::from_ints(&[0, 4]);
        assert!(poly_gcd(&a, &b).is_one());
    }

    #[test]
    fn gcd_monic_output() {
        let a = UniPoly::from_ints(&[-2, 0, 2]); // 2(x-1)(x+1)
        let b = UniPoly::from_ints(&[3, 3]); // 3(x+1)
        assert_eq!(poly_gcd(&a, &b), UniPoly::from_ints(&[1, 1]));
    }

    #[test]
    fn yun_examples() {
        // x^3 + x^2 = x^2 (x+1)
        let p = UniPoly::from_ints(&[0, 0, 1, 1]);
        let d = yun_decompose(&p);
        assert_eq!(d.content, q(1));
        assert_eq!(
            d.factors,
            vec![
                (1, UniPoly::from_ints(&[1, 1])),
                (2, UniPoly::from_ints(&[0, 1])),
            ]
        );
        // (x^2 - 2)^2 keeps the irrational pair grouped
        let p = UniPoly::from_ints(&[-2, 0, 1]).pow(2);
        let d = yun_decompose(&p);
        assert_eq!(d.factors, vec![(2, UniPoly::from_ints(&[-2, 0, 1]))]);
        // x (x+3)^2
        let p = UniPoly::from_ints(&[0, 1]).mul(&UniPoly::from_ints(&[3, 1]).pow(2));
        let d = yun_decompose(&p);
        assert_eq!(
            d.factors,
            vec![
                (1, UniPoly::from_ints(&[0, 1])),
                (2, UniPoly::from_ints(&[3, 1])),
            ]
        );
        assert_eq!(d.reassemble(), p);
    }

    #[test]
    fn resultant_examples() {
        let a = UniPoly::from_ints(&[-2, 1]);
        let b = UniPoly::from_ints(&[-3, 1]);
        assert_eq!(resultant(&a, &b), q(-1));
        let p = UniPoly::from_ints(&[-2, 0, 1]);
        assert_eq!(resultant(&p, &p), q(0));
        let a = UniPoly::from_ints(&[-2, 1]);
        let b = UniPoly::from_ints(&[-5, 0, 1]);
        assert_eq!(resultant(&a, &b), q(-1));
    }

    #[test]
    fn resultant_scaling() {
        // lc(a)^1 * b(2) = 2 * (-3) = -6
        let a = UniPoly::from_ints(&[-4, 2]);
        let b = UniPoly::from_ints(&[-9, 3]);
        assert_eq!(resultant(&a, &b), q(-6));
    }

    #[test]
    fn compose_examples() {
        // (x^2, x+1, 1) -> ((x+1)^2, 1)
        let outer = UniPoly::from_ints(&[0, 0, 1]);
        let (n, d) = compose(&outer, &UniPoly::from_ints(&[1, 1]), &UniPoly::one());
        assert_eq!(n, UniPoly::from_ints(&[1, 2, 1]));
        assert!(d.is_one());
        // identity outer
        let f = UniPoly::from_ints(&[3, 0, 7]);
        let g = UniPoly::from_ints(&[1, 2]);
        let (n, d) = compose(&UniPoly::x(), &f, &g);
        assert_eq!(n, f);
        assert_eq!(d, g);
        // (x^2 + 1, x, x - 1) -> (x^2 + (x-1)^2, (x-1)^2)
        let outer = UniPoly::from_ints(&[1, 0, 1]);
        let (n, d) = compose(&outer, &UniPoly::x(), &UniPoly::from_ints(&[-1, 1]));
        assert_eq!(n, UniPoly::from_ints(&[1, -2, 2]));
        assert_eq!(d, UniPoly::from_ints(&[1, -2, 1]));
    }

    #[test]
    fn rational_roots_examples() {
        let b = FactorBudget::default();
        // 6x^2 - 5x + 1 = (2x-1)(3x-1)
        let p = UniPoly::from_ints(&[1, -5, 6]);
        let r = rational_roots(&p, &b).unwrap();
        assert_eq!(r, vec![(qq(1, 3), 1), (qq(1, 2), 1)]);
        // x^2 + 1: none
        let p = UniPoly::from_ints(&[1, 0, 1]);
        assert!(rational_roots(&p, &b).unwrap().is_empty());
        // x (x+3)^2
        let p = UniPoly::from_ints(&[0, 1]).mul(&UniPoly::from_ints(&[3, 1]).pow(2));
        let r = rational_roots(&p, &b).unwrap();
        assert_eq!(r, vec![(q(-3), 2), (q(0), 1)]);
    }

    #[test]
    fn coprime_basis_examples() {
        // {x^2 - 1, x - 1} -> {x - 1, x + 1}
        let out = coprime_basis(&[UniPoly::from_ints(&[-1, 0, 1]), UniPoly::from_ints(&[-1, 1])]);
        assert_eq!(
            out,
            vec![UniPoly::from_ints(&[-1, 1]), UniPoly::from_ints(&[1, 1])]
        );
        // {x^2 - 2} stays whole
        let out = coprime_basis(&[UniPoly::from_ints(&[-2, 0, 1])]);
        assert_eq!(out, vec![UniPoly::from_ints(&[-2, 0, 1])]);
        // {x^2 - 1, x^2 - 3x + 2} -> {x - 1, x + 1, x - 2}
        let out = coprime_basis(&[
            UniPoly::from_ints(&[-1, 0, 1]),
            UniPoly::from_ints(&[2, -3, 1]),
        ]);
        assert_eq!(
            out,
            vec![
                UniPoly::from_ints(&[-2, 1]),
                UniPoly::from_ints(&[-1, 1]),
                UniPoly::from_ints(&[1, 1]),
            ]
        );
    }

    #[test]
    fn divrem_round_trip() {
        let a = UniPoly::from_coeffs(vec![qq(1, 2), q(3), q(0), q(7), q(2)]);
        let d = UniPoly::from_coeffs(vec![q(-1), qq(2, 3), q(1)]);
        let (quot, rem) = a.divrem(&d);
        assert_eq!(quot.mul(&d).add(&rem), a);
        assert!(rem.deg() < d.deg());
    }

    #[test]
    fn display_and_valuation() {
        let p = UniPoly::from_coeffs(vec![qq(-1, 2), q(0), q(3)]);
        assert_eq!(p.to_string(), "3*x^2 - 1/2");
        let p = UniPoly::from_ints(&[0, 0, 5, 5]);
        assert_eq!(p.valuation_at(&q(0)), 2);
        assert_eq!(p.valuation_at(&q(-1)), 1);
        assert_eq!(p.valuation_at(&q(2)), 0);
    }
}
