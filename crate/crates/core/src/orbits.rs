//! Orbits on P^1(Q), m-th power membership sequences, and certified
//! arithmetic-progression index sets.
//!
//! Certification rests on a verified iterate relation phi^r = phi^s
//! psi^m: membership of phi^n(a) for n >= s depends only on the residue
//! of n modulo r - s, except at the (at most two, for an infinite
//! orbit) indices where the orbit meets {0, infinity}. Preperiodic
//! orbits short-circuit through their detected cycle. Every certificate
//! is cross-validated against direct evaluation up to the horizon and
//! spot-checked deeper.

use num_rational::BigRational;

use crate::arith::{
    multiplicative_order, mth_root_rational, order_mod_power, FactorBudget,
};
use crate::error::{Error, Result};
use crate::powerclass::{find_relation, IterateRelation, RelationSearch};
use crate::qpoly::rational_roots;
use crate::ratmap::{ProjectivePoint, RationalMap};

/// Bit-size cap per orbit point; exact arithmetic means truncation is
/// the only failure mode (heights square every step).
#[derive(Debug, Clone, Copy)]
pub struct OrbitBudget {
    pub max_bits: u64,
}

impl Default for OrbitBudget {
    fn default() -> Self {
        OrbitBudget { max_bits: 100_000 }
    }
}

/// Exact forward orbit. points[n+1] = phi(points[n]); stops early at a
/// detected cycle (the record then holds the tail plus one full cycle)
/// or at the bit budget.
#[derive(Debug, Clone)]
pub struct OrbitRecord {
    pub points: Vec<ProjectivePoint>,
    /// (tail length, cycle length) when the orbit is preperiodic.
    pub preperiod: Option<(usize, usize)>,
    pub truncated: bool,
}

impl OrbitRecord {
    /// The orbit value at index n, when determined by this record.
    pub fn value_at(&self, n: usize) -> Option<&ProjectivePoint> {
        if n < self.points.len() {
            return Some(&self.points[n]);
        }
        let (tail, cycle) = self.preperiod?;
        Some(&self.points[tail + (n - tail) % cycle])
    }
}

/// Orbit of a to index n_max (inclusive), preperiodicity detected by
/// canonical-form equality.
pub fn orbit(
    phi: &RationalMap,
    start: &ProjectivePoint,
    n_max: usize,
    budget: &OrbitBudget,
) -> OrbitRecord {
    let mut points = vec![start.clone()];
    let mut preperiod = None;
    let mut truncated = false;
    for _ in 0..n_max {
        let last = points.last().unwrap();
        if last.bit_size() > budget.max_bits {
            truncated = true;
            break;
        }
        let next = phi.eval(last);
        if let Some(pos) = points.iter().position(|p| *p == next) {
            preperiod = Some((pos, points.len() - pos));
            points.push(next);
            break;
        }
        points.push(next);
    }
    OrbitRecord {
        points,
        preperiod,
        truncated,
    }
}

/// Membership in P^1(Q)^m = Q^m union {infinity}.
pub fn is_power_point(p: &ProjectivePoint, m: u32) -> bool {
    match p.to_rational() {
        None => true,
        Some(q) => mth_root_rational(&q, m).is_some(),
    }
}

/// Membership in Q^m only (infinity excluded), as the residue table of
/// the certification construction requires.
fn is_power_value(p: &ProjectivePoint, m: u32) -> bool {
    match p.to_rational() {
        None => false,
        Some(q) => mth_root_rational(&q, m).is_some(),
    }
}

/// { n <= n_max : phi^n(a) in P^1(Q)^m }, each index decided exactly.
pub fn power_indices(
    phi: &RationalMap,
    start: &ProjectivePoint,
    m: u32,
    n_max: usize,
    budget: &OrbitBudget,
) -> Result<Vec<usize>> {
    let rec = orbit(phi, start, n_max, budget);
    let mut out = Vec::new();
    for n in 0..=n_max {
        match rec.value_at(n) {
            Some(p) => {
                if is_power_point(p, m) {
                    out.push(n);
                }
            }
            None => {
                return Err(Error::BitBudget {
                    bits: rec.points.last().unwrap().bit_size(),
                    budget: budget.max_bits,
                })
            }
        }
    }
    Ok(out)
}

/// An arithmetic progression { offset + modulus * k : k >= 0 }.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Progression {
    pub offset: usize,
    pub modulus: usize,
}

impl Progression {
    pub fn contains(&self, n: usize) -> bool {
        n >= self.offset && (n - self.offset) % self.modulus == 0
    }
}

/// A certified index set: finitely many exceptional indices plus
/// pairwise disjoint infinite progressions; exact for all n.
#[derive(Debug, Clone)]
pub struct ProgressionSet {
    pub exceptional: Vec<usize>,
    pub progressions: Vec<Progression>,
    /// Membership was re-verified by direct evaluation up to here.
    pub verified_horizon: usize,
}

impl ProgressionSet {
    pub fn contains(&self, n: usize) -> bool {
        self.exceptional.contains(&n) || self.progressions.iter().any(|p| p.contains(n))
    }

    /// Number of arithmetic progressions needed in the singleton-plus-
    /// infinite presentation.
    pub fn component_count(&self) -> usize {
        self.exceptional.len() + self.progressions.len()
    }
}

/// Result of a certification attempt.
#[derive(Debug, Clone)]
pub enum CertifyOutcome {
    /// Index set certified for every n.
    Certified {
        set: ProgressionSet,
        relation: Option<IterateRelation>,
    },
    /// No iterate relation within bounds: only the finite table is
    /// available, no certification possible.
    Uncertified { raw_indices: Vec<usize>, horizon: usize },
}

/// Certify { n : phi^n(a) in P^1(Q)^m } as a finite union of
/// arithmetic progressions.
///
/// With a verified relation (r, s) the set is assembled from the
/// residue table of phi^k(a) for k < r plus the orbit's visits to
/// {0, infinity}; a preperiodic orbit is certified directly from its
/// cycle. Hits of {0, infinity} are located inside the computed window,
/// which also watches the zero/pole set of the witness psi (an orbit
/// can only reach {0, infinity} through it r steps earlier).
pub fn certify_progressions(
    phi: &RationalMap,
    start: &ProjectivePoint,
    m: u32,
    horizon: usize,
    search: &RelationSearch,
    orbit_budget: &OrbitBudget,
    factor_budget: &FactorBudget,
) -> Result<CertifyOutcome> {
    let relation = find_relation(phi, m, search)?;
    let window = horizon.max(
        relation
            .as_ref()
            .map(|rel| 3 * rel.r as usize + 3)
            .unwrap_or(horizon),
    );
    let rec = orbit(phi, start, window, orbit_budget);

    // Preperiodic orbits: membership is eventually periodic with the
    // cycle, exactly.
    if let Some((tail, cycle)) = rec.preperiod {
        let mut exceptional = Vec::new();
        let mut progressions = Vec::new();
        for n in 0..tail {
            if is_power_point(&rec.points[n], m) {
                exceptional.push(n);
            }
        }
        for i in 0..cycle {
            if is_power_point(&rec.points[tail + i], m) {
                progressions.push(Progression {
                    offset: tail + i,
                    modulus: cycle,
                });
            }
        }
        let set = ProgressionSet {
            exceptional,
            progressions,
            verified_horizon: horizon,
        };
        validate_against_direct(phi, start, m, horizon, &set, orbit_budget)?;
        return Ok(CertifyOutcome::Certified { set, relation });
    }

    let Some(rel) = relation else {
        return Ok(CertifyOutcome::Uncertified {
            raw_indices: power_indices(phi, start, m, horizon, orbit_budget)?,
            horizon,
        });
    };
    if rec.truncated && rec.points.len() <= rel.r as usize {
        return Err(Error::BitBudget {
            bits: rec.points.last().unwrap().bit_size(),
            budget: orbit_budget.max_bits,
        });
    }

    let (r, s) = (rel.r as usize, rel.s as usize);
    let modulus = r - s;

    // Residue table over Q^m (infinity deliberately excluded here; the
    // orbit's visits to {0, infinity} enter separately below).
    let mut progressions = Vec::new();
    for i in s..r {
        if is_power_value(&rec.points[i], m) {
            progressions.push(Progression {
                offset: i,
                modulus,
            });
        }
    }
    let mut exceptional = Vec::new();
    for n in 0..s {
        if is_power_value(&rec.points[n], m) {
            exceptional.push(n);
        }
    }

    // Visits to {0, infinity}: members regardless of the table. An
    // infinite orbit visits each at most once. A visit at n > window
    // would require the orbit to meet a zero or pole of psi at n - r;
    // scan the window for those too and extend if one appears late.
    let mut hit_guard: Vec<BigRational> = Vec::new();
    for p in [&rel.psi_num, &rel.psi_den] {
        if !p.is_constant() {
            for (root, _) in rational_roots(p, factor_budget)? {
                hit_guard.push(root);
            }
        }
    }
    let mut hits = Vec::new();
    for (n, p) in rec.points.iter().enumerate() {
        if p.is_infinity() || p.is_zero() {
            hits.push(n);
        }
    }
    let late_meeting = rec.points.iter().enumerate().any(|(n, p)| {
        n + r > rec.points.len()
            && p.to_rational()
                .is_some_and(|q| hit_guard.iter().any(|z| *z == q))
    });
    if late_meeting {
        // The meeting pins a concrete future visit; extend the window
        // far enough to observe it directly.
        let rec2 = orbit(phi, start, rec.points.len() + r + 1, orbit_budget);
        for (n, p) in rec2.points.iter().enumerate() {
            if (p.is_infinity() || p.is_zero()) && !hits.contains(&n) {
                hits.push(n);
            }
        }
    }
    assert!(hits.len() <= 2, "an infinite orbit visits 0 and infinity at most once each");
    for n in hits {
        if !exceptional.contains(&n) && !progressions.iter().any(|p| p.contains(n)) {
            exceptional.push(n);
        }
    }
    exceptional.sort_unstable();

    let set = ProgressionSet {
        exceptional,
        progressions,
        verified_horizon: horizon,
    };
    validate_against_direct(phi, start, m, horizon, &set, orbit_budget)?;
    // Spot re-verification deep in the periodic regime.
    let spot = s + 3 * modulus;
    if spot > horizon && !rec.truncated {
        if let Some(p) = rec.value_at(spot) {
            assert_eq!(
                is_power_point(p, m),
                set.contains(spot),
                "spot check at n = {spot} disagrees with the certificate"
            );
        }
    }
    Ok(CertifyOutcome::Certified {
        set,
        relation: Some(rel),
    })
}

fn validate_against_direct(
    phi: &RationalMap,
    start: &ProjectivePoint,
    m: u32,
    horizon: usize,
    set: &ProgressionSet,
    budget: &OrbitBudget,
) -> Result<()> {
    let direct = power_indices(phi, start, m, horizon, budget)?;
    for n in 0..=horizon {
        assert_eq!(
            direct.contains(&n),
            set.contains(n),
            "certificate disagrees with direct evaluation at n = {n}"
        );
    }
    Ok(())
}

/// Exhaustive check that the certified set cannot be written as a union
/// of at most `count` arithmetic progressions (singletons allowed) with
/// modulus at most `max_modulus`.
pub fn needs_more_than(set: &ProgressionSet, count: usize, max_modulus: usize) -> bool {
    // Compare on a window long enough to separate eventually periodic
    // sets: all offsets considered, plus two full periods.
    let max_off = set
        .exceptional
        .iter()
        .copied()
        .chain(set.progressions.iter().map(|p| p.offset))
        .max()
        .unwrap_or(0)
        .max(max_modulus * max_modulus);
    let limit = max_off + 2 * max_modulus.max(1) * max_modulus.max(1) + 2;
    let target: Vec<bool> = (0..=limit).map(|n| set.contains(n)).collect();

    // Candidate components: singletons {l} and progressions (l, M).
    let mut components: Vec<Vec<bool>> = Vec::new();
    for l in 0..=max_off + 1 {
        components.push((0..=limit).map(|n| n == l).collect());
        for md in 1..=max_modulus {
            components.push((0..=limit).map(|n| n >= l && (n - l) % md == 0).collect());
        }
    }
    fn covers(target: &[bool], chosen: &[&Vec<bool>]) -> bool {
        target.iter().enumerate().all(|(n, &want)| {
            let got = chosen.iter().any(|c| c[n]);
            got == want
        })
    }
    // Unions of up to `count` components.
    fn search(
        target: &[bool],
        components: &[Vec<bool>],
        chosen: &mut Vec<usize>,
        from: usize,
        left: usize,
    ) -> bool {
        let refs: Vec<&Vec<bool>> = chosen.iter().map(|&i| &components[i]).collect();
        if covers(target, &refs) {
            return true;
        }
        if left == 0 {
            return false;
        }
        for i in from..components.len() {
            // Skip components that overshoot the target.
            if (0..target.len()).any(|n| components[i][n] && !target[n]) {
                continue;
            }
            chosen.push(i);
            if search(target, components, chosen, i + 1, left - 1) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    !search(&target, &components, &mut Vec::new(), 0, count)
}

/// Index-set data for a trivial map c x^j psi^m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrivialModulus {
    /// The power indices form at most a single point: no infinite
    /// progression exists (gcd(t, j) > 1 branch).
    Empty,
    /// Power indices, when infinite, form a single progression of this
    /// modulus.
    Progression { t: u64, modulus: u64 },
}

/// The (t, M) data of the trivial-map certification: t is the order of
/// c in Q*/Q*^m and M the induced progression modulus; M <= m always.
pub fn trivial_modulus(
    c: &BigRational,
    j: u32,
    m: u32,
    budget: &FactorBudget,
) -> Result<TrivialModulus> {
    assert!(j < m, "trivial form has 0 <= j <= m-1");
    let t = order_mod_power(c, m, budget)?;
    let g = num_integer::gcd(t, u64::from(j));
    if g != 1 {
        return Ok(TrivialModulus::Empty);
    }
    let modulus = if j <= 1 {
        t
    } else {
        let n = num_bigint::BigInt::from(t * u64::from(j - 1));
        multiplicative_order(&num_bigint::BigInt::from(j), &n)?
    };
    assert!(modulus <= u64::from(m), "trivial modulus exceeds m");
    Ok(TrivialModulus::Progression { t, modulus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpoly::UniPoly;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn phi1() -> RationalMap {
        RationalMap::new(
            &UniPoly::from_ints(&[-9, -6, -1]),
            &UniPoly::from_ints(&[0, 4]),
        )
        .unwrap()
    }

    fn phi3() -> RationalMap {
        // -9(x-4)^2 / ((x-3)(3x-4)^2)
        let num = UniPoly::from_ints(&[-4, 1]).pow(2).scale(&q(-9, 1));
        let den = UniPoly::from_ints(&[-3, 1]).mul(&UniPoly::from_ints(&[-4, 3]).pow(2));
        RationalMap::new(&num, &den).unwrap()
    }

    fn type76() -> RationalMap {
        RationalMap::new(
            &UniPoly::from_ints(&[0, 432, 144]),
            &UniPoly::from_ints(&[81, -18, 1]),
        )
        .unwrap()
    }

    #[test]
    fn orbit_phi1() {
        let rec = orbit(
            &phi1(),
            &ProjectivePoint::from_int(-1),
            5,
            &OrbitBudget::default(),
        );
        let expect: Vec<BigRational> = vec![
            q(-1, 1),
            q(1, 1),
            q(-4, 1),
            q(1, 16),
            q(-2401, 64),
            q(47, 28) * q(47, 28) * q(47, 28) * q(47, 28),
        ];
        for (n, e) in expect.iter().enumerate() {
            assert_eq!(rec.points[n].to_rational().as_ref(), Some(e), "n = {n}");
        }
        assert!(rec.preperiod.is_none());
    }

    #[test]
    fn orbit_cycle_detection() {
        let sq = RationalMap::from_polynomial(&UniPoly::from_ints(&[0, 0, 1])).unwrap();
        let rec = orbit(&sq, &ProjectivePoint::from_int(1), 5, &OrbitBudget::default());
        assert_eq!(rec.preperiod, Some((0, 1)));
        assert_eq!(rec.value_at(5), Some(&ProjectivePoint::from_int(1)));
    }

    #[test]
    fn orbit_budget_truncates() {
        let m = RationalMap::from_polynomial(&UniPoly::from_ints(&[1, 0, 1])).unwrap();
        let tiny = OrbitBudget { max_bits: 32 };
        let rec = orbit(&m, &ProjectivePoint::from_int(3), 100, &tiny);
        assert!(rec.truncated);
        assert!(rec.points.len() < 100);
    }

    #[test]
    fn power_indices_examples() {
        let b = OrbitBudget::default();
        // phi1, seed -1, m = 4: fourth powers at odd indices
        let idx = power_indices(&phi1(), &ProjectivePoint::from_int(-1), 4, 9, &b).unwrap();
        assert_eq!(idx, vec![1, 3, 5, 7, 9]);
        // phi3, seed 1, m = 2: squares at multiples of 3
        let idx = power_indices(&phi3(), &ProjectivePoint::from_int(1), 2, 8, &b).unwrap();
        assert_eq!(idx, vec![0, 3, 6]);
        // type76, seed 1: {0, 2} union odd
        let idx = power_indices(&type76(), &ProjectivePoint::from_int(1), 2, 11, &b).unwrap();
        assert_eq!(idx, vec![0, 1, 2, 3, 5, 7, 9, 11]);
    }

    #[test]
    fn orbit_phi3_values() {
        let rec = orbit(&phi3(), &ProjectivePoint::from_int(1), 3, &OrbitBudget::default());
        assert_eq!(rec.points[1].to_rational().unwrap(), q(81, 2));
        assert_eq!(
            rec.points[2].to_rational().unwrap(),
            q(-6, 1) * q(73, 1175) * q(73, 1175)
        );
        assert_eq!(
            rec.points[3].to_rational().unwrap(),
            q(3263253475, 1913072691) * q(3263253475, 1913072691)
        );
    }

    fn certify(
        phi: &RationalMap,
        seed: i64,
        m: u32,
        horizon: usize,
    ) -> CertifyOutcome {
        certify_progressions(
            phi,
            &ProjectivePoint::from_int(seed),
            m,
            horizon,
            &RelationSearch::for_modulus(m),
            &OrbitBudget::default(),
            &FactorBudget::default(),
        )
        .unwrap()
    }

    #[test]
    fn certify_phi1() {
        match certify(&phi1(), -1, 4, 9) {
            CertifyOutcome::Certified { set, relation } => {
                assert_eq!(set.exceptional, Vec::<usize>::new());
                assert_eq!(
                    set.progressions,
                    vec![Progression {
                        offset: 1,
                        modulus: 2
                    }]
                );
                let rel = relation.unwrap();
                assert_eq!((rel.r, rel.s), (3, 1));
            }
            other => panic!("expected certification, got {other:?}"),
        }
    }

    #[test]
    fn certify_phi3() {
        match certify(&phi3(), 1, 2, 9) {
            CertifyOutcome::Certified { set, .. } => {
                assert!(set.exceptional.is_empty());
                assert_eq!(
                    set.progressions,
                    vec![Progression {
                        offset: 0,
                        modulus: 3
                    }]
                );
            }
            other => panic!("expected certification, got {other:?}"),
        }
    }

    #[test]
    fn certify_type76_needs_three() {
        match certify(&type76(), 1, 2, 11) {
            CertifyOutcome::Certified { set, .. } => {
                assert_eq!(set.exceptional, vec![0, 2]);
                assert_eq!(
                    set.progressions,
                    vec![Progression {
                        offset: 1,
                        modulus: 2
                    }]
                );
                assert!(needs_more_than(&set, 2, 2));
                assert!(!needs_more_than(&set, 3, 2));
            }
            other => panic!("expected certification, got {other:?}"),
        }
    }

    #[test]
    fn certify_preperiodic() {
        let sq = RationalMap::from_polynomial(&UniPoly::from_ints(&[0, 0, 1])).unwrap();
        match certify(&sq, 1, 2, 6) {
            CertifyOutcome::Certified { set, .. } => {
                assert!(set.contains(0) && set.contains(5));
            }
            other => panic!("expected certification, got {other:?}"),
        }
    }

    #[test]
    fn certify_uncertified_when_growing() {
        let m = RationalMap::from_polynomial(&UniPoly::from_ints(&[1, 0, 1])).unwrap();
        match certify(&m, 1, 2, 6) {
            CertifyOutcome::Uncertified { raw_indices, .. } => {
                // 1 -> 2 -> 5 -> 26 -> ...; only n = 0 gives a square
                assert_eq!(raw_indices, vec![0]);
            }
            other => panic!("expected uncertified, got {other:?}"),
        }
    }

    #[test]
    fn trivial_modulus_examples() {
        let b = FactorBudget::default();
        // (2, 1, 2): t = 2, M = 2
        assert_eq!(
            trivial_modulus(&q(2, 1), 1, 2, &b).unwrap(),
            TrivialModulus::Progression { t: 2, modulus: 2 }
        );
        // square c, j = 0: t = 1, M = 1
        assert_eq!(
            trivial_modulus(&q(9, 4), 0, 2, &b).unwrap(),
            TrivialModulus::Progression { t: 1, modulus: 1 }
        );
        // c not a p-th power for any p | m, j = 1: M = m
        for m in [2u32, 3, 4, 6] {
            assert_eq!(
                trivial_modulus(&q(5, 1), 1, m, &b).unwrap(),
                TrivialModulus::Progression {
                    t: u64::from(m),
                    modulus: u64::from(m)
                }
            );
        }
        // gcd(t, j) > 1: empty
        assert_eq!(
            trivial_modulus(&q(5, 1), 2, 4, &b).unwrap(),
            TrivialModulus::Empty
        );
    }

    #[test]
    fn needs_more_than_basic() {
        // {3k} is a single progression
        let set = ProgressionSet {
            exceptional: vec![],
            progressions: vec![Progression {
                offset: 0,
                modulus: 3,
            }],
            verified_horizon: 9,
        };
        assert!(!needs_more_than(&set, 1, 3));
        // {3k} union {3k+2} needs two
        let set = ProgressionSet {
            exceptional: vec![],
            progressions: vec![
                Progression {
                    offset: 0,
                    modulus: 3,
                },
                Progression {
                    offset: 2,
                    modulus: 3,
                },
            ],
            verified_horizon: 9,
        };
        assert!(needs_more_than(&set, 1, 3));
        assert!(!needs_more_than(&set, 2, 3));
    }
}
