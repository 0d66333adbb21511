//! Integer factorization with an explicit effort budget, exact m-th
//! roots of rationals, and classes in Q*/Q*^m.
//!
//! Factorization is trial division over a fixed sieve followed by
//! Brent-variant Pollard rho with an iteration cap. Exhausting the cap
//! yields [`Error::Unfactored`]; a wrong answer is never returned.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Effort cap for [`factor_integer`] and everything built on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorBudget {
    /// Trial-divide by all primes up to this bound.
    pub trial_limit: u64,
    /// Total Pollard-rho iterations across all cofactors.
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            trial_limit: 1_000_000,
            rho_iterations: 4_000_000,
        }
    }
}

const SIEVE_LIMIT: usize = 1_000_000;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut composite = vec![false; SIEVE_LIMIT + 1];
        let mut primes = Vec::new();
        for p in 2..=SIEVE_LIMIT {
            if !composite[p] {
                primes.push(p as u32);
                let mut q = p * p;
                while q <= SIEVE_LIMIT {
                    composite[q] = true;
                    q += p;
                }
            }
        }
        primes
    })
}

fn mulmod_u64(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn powmod_u64(mut base: u64, mut exp: u64, n: u64) -> u64 {
    let mut acc: u64 = 1 % n;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, n);
        }
        base = mulmod_u64(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64 (the 12-base certificate covers
/// everything below 3.3e24).
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin on BigInt. Deterministic below 3.3e24, otherwise a
/// 64-round strong probable-prime test with fixed small bases plus
/// bases derived from the input.
pub fn is_probable_prime(n: &BigInt) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    if !n.is_positive() || n.is_even() {
        return false;
    }
    let one = BigInt::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut bases: Vec<BigInt> = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
        .iter()
        .map(|&b| BigInt::from(b))
        .collect();
    // Extra bases spread over [41, n-2]; deterministic in the input.
    let mut x = BigInt::from(41u64);
    for _ in 0..52 {
        bases.push(x.mod_floor(&(n - 3)) + 2);
        x = x * 6364136223846793005u64 + 1442695040888963407u64;
    }
    'witness: for a in bases {
        let a = a.mod_floor(n);
        if a.is_zero() || a.is_one() || a == n_minus_1 {
            continue;
        }
        let mut y = a.modpow(&d, n);
        if y.is_one() || y == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            y = y.modpow(&BigInt::from(2u32), n);
            if y == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho_u64(n: u64, budget: &mut u64) -> Option<u64> {
    // Brent's cycle variant with batched gcds; n odd, composite, > 1.
    let mut c: u64 = 1;
    while *budget > 0 {
        let mut y: u64 = 2;
        let mut r: u64 = 1;
        let mut q: u64 = 1;
        let mut g: u64 = 1;
        let mut x: u64 = 0;
        let mut ys: u64 = 0;
        'outer: while g == 1 {
            x = y;
            for _ in 0..r {
                y = mulmod_u64(y, y, n).wrapping_add(c) % n;
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let batch = 128.min(r - k);
                for _ in 0..batch {
                    if *budget == 0 {
                        break 'outer;
                    }
                    *budget -= 1;
                    y = mulmod_u64(y, y, n).wrapping_add(c) % n;
                    q = mulmod_u64(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += batch;
            }
            r *= 2;
        }
        if g == n {
            // Backtrack one step at a time.
            loop {
                ys = mulmod_u64(ys, ys, n).wrapping_add(c) % n;
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g > 1 && g < n {
            return Some(g);
        }
        c += 1;
    }
    None
}

fn rho_bigint(n: &BigInt, budget: &mut u64) -> Option<BigInt> {
    let one = BigInt::one();
    let mut c = BigInt::one();
    while *budget > 0 {
        let mut y = BigInt::from(2u32);
        let mut r: u64 = 1;
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        let mut x = BigInt::zero();
        let mut ys = BigInt::zero();
        'outer: while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = (&y * &y + &c).mod_floor(n);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let batch = 128.min(r - k);
                for _ in 0..batch {
                    if *budget == 0 {
                        break 'outer;
                    }
                    *budget -= 1;
                    y = (&y * &y + &c).mod_floor(n);
                    q = (q * (&x - &y).abs()).mod_floor(n);
                }
                g = q.gcd(n);
                k += batch;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = (&ys * &ys + &c).mod_floor(n);
                g = (&x - &ys).abs().gcd(n);
                if g > one {
                    break;
                }
            }
        }
        if g > one && &g < n {
            return Some(g);
        }
        c += 1;
    }
    None
}

/// v = root^k with k >= 2 maximal-ish (first hit wins); None if no such.
fn perfect_power(v: &BigInt) -> Option<(BigInt, u32)> {
    let bits = v.bits();
    for k in 2..=bits.max(2) as u32 {
        if k > 1 && (bits as u32) / k == 0 {
            break;
        }
        let r = v.nth_root(k);
        if r.pow(k) == *v {
            return Some((r, k));
        }
    }
    None
}

/// Prime factorization of |n| as (prime, exponent) pairs with strictly
/// increasing primes. |n| <= 1 factors as the empty product.
pub fn factor_integer(n: &BigInt, budget: &FactorBudget) -> Result<Vec<(BigInt, u32)>> {
    let mut v = n.abs();
    let mut out: BTreeMap<BigInt, u32> = BTreeMap::new();
    if v <= BigInt::one() {
        return Ok(Vec::new());
    }
    for &p in small_primes() {
        if u64::from(p) > budget.trial_limit {
            break;
        }
        let pb = BigInt::from(p);
        if &pb * &pb > v {
            break;
        }
        while (&v % &pb).is_zero() {
            v /= &pb;
            *out.entry(pb.clone()).or_insert(0) += 1;
        }
        if v.is_one() {
            break;
        }
    }
    let mut rho_left = budget.rho_iterations;
    let mut stack = vec![(v, 1u32)];
    while let Some((w, mult)) = stack.pop() {
        if w.is_one() {
            continue;
        }
        if is_probable_prime(&w) {
            *out.entry(w).or_insert(0) += mult;
            continue;
        }
        if let Some((root, k)) = perfect_power(&w) {
            stack.push((root, mult * k));
            continue;
        }
        let split = if let Some(small) = w.to_u64() {
            rho_u64(small, &mut rho_left).map(BigInt::from)
        } else {
            rho_bigint(&w, &mut rho_left)
        };
        match split {
            Some(d) => {
                let q = &w / &d;
                stack.push((d, mult));
                stack.push((q, mult));
            }
            None => return Err(Error::Unfactored { remaining: w }),
        }
    }
    Ok(out.into_iter().collect())
}

/// Factorization of a nonzero rational as (prime, signed exponent),
/// primes strictly increasing; the sign of q is not part of the output.
pub fn factor_rational(q: &BigRational, budget: &FactorBudget) -> Result<Vec<(BigInt, i64)>> {
    assert!(!q.is_zero(), "factor_rational: zero input");
    let mut map: BTreeMap<BigInt, i64> = BTreeMap::new();
    for (p, e) in factor_integer(q.numer(), budget)? {
        *map.entry(p).or_insert(0) += i64::from(e);
    }
    for (p, e) in factor_integer(q.denom(), budget)? {
        *map.entry(p).or_insert(0) -= i64::from(e);
    }
    Ok(map.into_iter().filter(|(_, e)| *e != 0).collect())
}

/// Exact m-th root of a rational, if one exists in Q.
///
/// 0 -> 0; for even m negative inputs have no root; for odd m the root
/// carries the sign of the input. No factorization involved.
pub fn mth_root_rational(q: &BigRational, m: u32) -> Option<BigRational> {
    assert!(m >= 2, "mth_root_rational: m must be >= 2");
    if q.is_zero() {
        return Some(BigRational::zero());
    }
    if q.is_negative() && m % 2 == 0 {
        return None;
    }
    let num = q.numer().abs();
    let den = q.denom().clone();
    let rn = num.nth_root(m);
    if rn.pow(m) != num {
        return None;
    }
    let rd = den.nth_root(m);
    if rd.pow(m) != den {
        return None;
    }
    let root = BigRational::new(rn, rd);
    if q.is_negative() {
        Some(-root)
    } else {
        Some(root)
    }
}

/// Canonical representative of a nonzero rational in Q*/Q*^m.
///
/// Two rationals produce equal `UnitClass`es exactly when their
/// quotient is an m-th power in Q. For odd m the sign is absorbed into
/// an m-th power and the class is always "positive".
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnitClass {
    m: u32,
    negative: bool,
    factors: Vec<(BigInt, u32)>,
}

impl UnitClass {
    /// The class of 1.
    pub fn trivial(m: u32) -> Self {
        UnitClass {
            m,
            negative: false,
            factors: Vec::new(),
        }
    }

    pub fn modulus(&self) -> u32 {
        self.m
    }

    /// +1 or -1; always +1 when m is odd.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    /// (prime, exponent) pairs, exponents in [1, m-1], primes increasing.
    pub fn factors(&self) -> &[(BigInt, u32)] {
        &self.factors
    }

    pub fn is_trivial(&self) -> bool {
        !self.negative && self.factors.is_empty()
    }

    /// Group law in Q*/Q*^m.
    pub fn mul(&self, other: &UnitClass) -> Result<UnitClass> {
        if self.m != other.m {
            return Err(Error::ModulusMismatch(self.m, other.m));
        }
        let mut map: BTreeMap<BigInt, u32> = self.factors.iter().cloned().collect();
        for (p, e) in &other.factors {
            let entry = map.entry(p.clone()).or_insert(0);
            *entry = (*entry + e) % self.m;
        }
        Ok(UnitClass {
            m: self.m,
            negative: self.negative != other.negative,
            factors: map.into_iter().filter(|(_, e)| *e != 0).collect(),
        })
    }

    pub fn inv(&self) -> UnitClass {
        UnitClass {
            m: self.m,
            negative: self.negative,
            factors: self
                .factors
                .iter()
                .map(|(p, e)| (p.clone(), self.m - e))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> UnitClass {
        UnitClass {
            m: self.m,
            negative: self.negative && k % 2 == 1,
            factors: self
                .factors
                .iter()
                .filter_map(|(p, e)| {
                    let f = (e * k) % self.m;
                    (f != 0).then(|| (p.clone(), f))
                })
                .collect(),
        }
    }

    /// A rational representing this class (product of prime powers with
    /// the class sign).
    pub fn representative(&self) -> BigRational {
        let mut n = BigInt::one();
        for (p, e) in &self.factors {
            n *= p.pow(*e);
        }
        if self.negative {
            n = -n;
        }
        BigRational::from(n)
    }
}

/// Class of a nonzero rational in Q*/Q*^m.
pub fn unit_class(q: &BigRational, m: u32, budget: &FactorBudget) -> Result<UnitClass> {
    assert!(m >= 2, "unit_class: m must be >= 2");
    assert!(!q.is_zero(), "unit_class: zero input");
    let factors = factor_rational(q, budget)?
        .into_iter()
        .filter_map(|(p, e)| {
            let r = e.rem_euclid(i64::from(m)) as u32;
            (r != 0).then_some((p, r))
        })
        .collect();
    Ok(UnitClass {
        m,
        negative: q.is_negative() && m % 2 == 0,
        factors,
    })
}

/// Smallest t >= 1 with c^t an m-th power in Q (the order of c in
/// Q*/Q*^m).
pub fn order_mod_power(c: &BigRational, m: u32, budget: &FactorBudget) -> Result<u64> {
    assert!(!c.is_zero(), "order_mod_power: zero input");
    let mut t: u64 = 1;
    for (_, e) in factor_rational(c, budget)? {
        let r = e.rem_euclid(i64::from(m)) as u64;
        if r != 0 {
            let tp = u64::from(m) / u64::from(m).gcd(&r);
            t = t.lcm(&tp);
        }
    }
    if c.is_negative() && m % 2 == 0 {
        t = t.lcm(&2);
    }
    Ok(t)
}

/// Least M >= 1 with j^M = 1 mod n. Requires gcd(j, n) = 1.
pub fn multiplicative_order(j: &BigInt, n: &BigInt) -> Result<u64> {
    assert!(n.is_positive(), "multiplicative_order: modulus must be >= 1");
    if !j.gcd(n).is_one() {
        return Err(Error::NotCoprime {
            j: j.clone(),
            n: n.clone(),
        });
    }
    if n.is_one() {
        return Ok(1);
    }
    let jm = j.mod_floor(n);
    let mut acc = jm.clone();
    let mut order: u64 = 1;
    while !acc.is_one() {
        acc = (acc * &jm).mod_floor(n);
        order += 1;
    }
    Ok(order)
}
