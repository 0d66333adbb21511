//! Genus of superelliptic curves y^m = psi(x), the sequence g_n for
//! C_n : y^m = phi^n(x), rho counts, and the bounded-vs-growing report.
//!
//! The genus needs only the multiset of zero/pole multiplicities of
//! psi, never the points themselves, and it is unchanged when psi moves
//! within its class in Q(x)*/Q(x)*^m. g_n is therefore computed from
//! the class of phi^n; the full-expansion route survives as an oracle
//! for small n.

use num_integer::Integer;
use num_rational::BigRational;

use crate::error::Result;
use crate::powerclass::{class_of_map, find_relation, IterateRelation, PowerClass, RelationSearch};
use crate::ratmap::{IterateBudget, RationalMap};

/// Multiplicity data of a rational function psi: finite zero/pole
/// layers as (signed exponent, number of distinct points over the
/// algebraic closure), with the modulus m of the covering y^m = psi.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityProfile {
    m: u32,
    layers: Vec<(i64, u64)>,
}

impl MultiplicityProfile {
    pub fn new(m: u32, layers: Vec<(i64, u64)>) -> Self {
        assert!(m >= 2);
        assert!(
            layers.iter().all(|&(e, c)| e != 0 && c >= 1),
            "profile layers need nonzero exponents and positive counts"
        );
        MultiplicityProfile { m, layers }
    }

    pub fn from_class(class: &PowerClass) -> Self {
        MultiplicityProfile {
            m: class.modulus(),
            layers: class
                .factors()
                .iter()
                .map(|(e, f)| (i64::from(*e), f.deg() as u64))
                .collect(),
        }
    }

    /// Finite layers of an explicit map (the expansion-based route).
    pub fn from_map(phi: &RationalMap, m: u32) -> Self {
        let zp = phi.zero_pole_profile();
        MultiplicityProfile {
            m,
            layers: zp
                .signed_layers()
                .into_iter()
                .map(|(e, c)| (e, c as u64))
                .collect(),
        }
    }

    pub fn modulus(&self) -> u32 {
        self.m
    }

    pub fn layers(&self) -> &[(i64, u64)] {
        &self.layers
    }

    /// Number of distinct finite zero/pole points.
    pub fn k(&self) -> u64 {
        self.layers.iter().map(|&(_, c)| c).sum()
    }

    /// Greatest a dividing m and every exponent.
    pub fn a(&self) -> u32 {
        let mut a = u64::from(self.m);
        for &(e, _) in &self.layers {
            a = a.gcd(&e.unsigned_abs());
        }
        a as u32
    }

    /// Number of points whose exponent m does not divide.
    pub fn t(&self) -> u64 {
        self.layers
            .iter()
            .filter(|&&(e, _)| e.rem_euclid(i64::from(self.m)) != 0)
            .map(|&(_, c)| c)
            .sum()
    }
}

/// Genus of y^m = psi(x) from the multiplicity profile of psi:
///
/// g = 1 + (k-1)/2 * m' - 1/2 (gcd(m', sum e') + sum gcd(m', e'))
///
/// with a = gcd(m, all e), m' = m/a, e' = e/a. Exact; the result is a
/// non-negative integer by construction.
pub fn superelliptic_genus(profile: &MultiplicityProfile) -> u64 {
    let a = i64::from(profile.a());
    let m_prime = i64::from(profile.m) / a;
    let k = profile.k() as i64;
    let mut sum_e_prime: i64 = 0;
    let mut sum_gcd: i64 = 0;
    for &(e, c) in &profile.layers {
        let e_prime = e / a;
        sum_e_prime += e_prime * c as i64;
        sum_gcd += m_prime.gcd(&e_prime) * c as i64;
    }
    let doubled = 2 + (k - 1) * m_prime - m_prime.gcd(&sum_e_prime) - sum_gcd;
    assert!(
        doubled >= 0 && doubled % 2 == 0,
        "genus formula must give a non-negative integer, got {doubled}/2"
    );
    (doubled / 2) as u64
}

/// The sandwich ceil(t/2 - 1) <= g <= (m-1)(t-1)/2 in terms of the
/// number t of points with exponent not divisible by m; (0, 0) when
/// t = 0.
pub fn genuscor_bounds(profile: &MultiplicityProfile) -> (u64, u64) {
    bounds_from_t(profile.t(), profile.m)
}

fn bounds_from_t(t: u64, m: u32) -> (u64, u64) {
    if t == 0 {
        return (0, 0);
    }
    let lower = (t - 1) / 2; // = ceil(t/2 - 1) for t >= 1
    let upper = (u64::from(m) - 1) * (t - 1) / 2;
    (lower, upper)
}

/// rho_n(0) + rho_n(infinity): preimages of 0 and infinity under phi^n
/// whose ramification index m does not divide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoCount {
    pub total: u64,
    pub finite: u64,
    pub infinity_counted: bool,
    /// (exponent mod m, layer degree) per class factor.
    pub detail: Vec<(u32, u64)>,
}

fn rho_from_class(class: &PowerClass) -> RhoCount {
    let m = i64::from(class.modulus());
    let mut finite: u64 = 0;
    let mut order_sum: i64 = 0;
    let mut detail = Vec::new();
    for (e, f) in class.factors() {
        let d = f.deg() as u64;
        finite += d;
        order_sum += i64::from(*e) * d as i64;
        detail.push((*e, d));
    }
    // The order of the class representative at infinity is minus the sum
    // of the finite orders, mod m; infinity contributes exactly when m
    // does not divide it.
    let infinity_counted = order_sum.rem_euclid(m) != 0;
    RhoCount {
        total: finite + u64::from(infinity_counted),
        finite,
        infinity_counted,
        detail,
    }
}

fn class_of_iterate(phi: &RationalMap, m: u32, n: u32, budget: &IterateBudget) -> Result<PowerClass> {
    assert!(n >= 1);
    let mut cur = class_of_map(phi, m);
    for _ in 1..n {
        cur = crate::powerclass::class_compose(&cur, phi, budget)?;
    }
    Ok(cur)
}

/// Genus of C_n : y^m = phi^n(x), via the class of phi^n.
pub fn genus_of_cn(phi: &RationalMap, m: u32, n: u32, budget: &IterateBudget) -> Result<u64> {
    let class = class_of_iterate(phi, m, n, budget)?;
    Ok(superelliptic_genus(&MultiplicityProfile::from_class(&class)))
}

/// Expansion-based oracle for small n: expand phi^n and read the
/// profile off its zeros and poles. Must agree with [`genus_of_cn`].
pub fn genus_of_cn_expanded(
    phi: &RationalMap,
    m: u32,
    n: u32,
    budget: &IterateBudget,
) -> Result<u64> {
    let it = phi.iterate(n, budget)?;
    Ok(superelliptic_genus(&MultiplicityProfile::from_map(&it, m)))
}

/// rho_n(phi) = rho_n(0) + rho_n(infinity), from the class of phi^n.
pub fn rho_n(phi: &RationalMap, m: u32, n: u32, budget: &IterateBudget) -> Result<RhoCount> {
    Ok(rho_from_class(&class_of_iterate(phi, m, n, budget)?))
}

/// One row of the genus table, with the rho sandwich evaluated.
#[derive(Debug, Clone)]
pub struct GenusRow {
    pub n: u32,
    pub genus: u64,
    pub rho: u64,
    /// ceil((rho - 3)/2) clamped at 0.
    pub lower: u64,
    /// (m - 1)(rho - 1)/2, 0 when rho = 0.
    pub upper: u64,
}

impl GenusRow {
    pub fn sandwich_holds(&self) -> bool {
        self.lower <= self.genus && self.genus <= self.upper
    }
}

/// Either a verified iterate relation (genus stays <= 1 forever) or the
/// observed finite table with growth ratios; no claim is made beyond
/// the computed range in the growing case.
#[derive(Debug, Clone)]
pub enum GenusVerdict {
    Bounded(IterateRelation),
    Growing {
        /// (n, g_{n+1}/g_n) for consecutive rows with g_n > 0.
        ratios: Vec<(u32, BigRational)>,
    },
}

#[derive(Debug, Clone)]
pub struct GenusReport {
    pub m: u32,
    pub rows: Vec<GenusRow>,
    pub verdict: GenusVerdict,
}

fn rhocor_bounds(rho: u64, m: u32) -> (u64, u64) {
    let lower = rho.saturating_sub(2) / 2; // = max(0, ceil((rho-3)/2))
    let upper = if rho == 0 {
        0
    } else {
        (u64::from(m) - 1) * (rho - 1) / 2
    };
    (lower, upper)
}

/// Genus table for n = 1..N plus the dichotomy verdict. Every row is
/// checked against the rho sandwich; in the bounded case every genus is
/// checked to be at most 1.
pub fn dichotomy_report(
    phi: &RationalMap,
    m: u32,
    n_max: u32,
    search: &RelationSearch,
) -> Result<GenusReport> {
    assert!(n_max >= 2, "dichotomy_report needs N >= 2");
    let mut rows = Vec::with_capacity(n_max as usize);
    let mut class = class_of_map(phi, m);
    for n in 1..=n_max {
        if n > 1 {
            class = crate::powerclass::class_compose(&class, phi, &search.degree_budget)?;
        }
        let genus = superelliptic_genus(&MultiplicityProfile::from_class(&class));
        let rho = rho_from_class(&class);
        let (lower, upper) = rhocor_bounds(rho.total, m);
        let row = GenusRow {
            n,
            genus,
            rho: rho.total,
            lower,
            upper,
        };
        assert!(
            row.sandwich_holds(),
            "rho sandwich violated at n = {n}: {row:?}"
        );
        rows.push(row);
    }
    let verdict = match find_relation(phi, m, search)? {
        Some(rel) => {
            assert!(
                rows.iter().all(|r| r.genus <= 1),
                "bounded verdict requires g_n <= 1"
            );
            GenusVerdict::Bounded(rel)
        }
        None => {
            let mut ratios = Vec::new();
            for w in rows.windows(2) {
                if w[0].genus > 0 {
                    ratios.push((
                        w[0].n,
                        BigRational::new(w[1].genus.into(), w[0].genus.into()),
                    ));
                }
            }
            GenusVerdict::Growing { ratios }
        }
    };
    Ok(GenusReport { m, rows, verdict })
}
