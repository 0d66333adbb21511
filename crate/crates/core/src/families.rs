//! Constructors for the explicit map families, each bundled with the
//! classification data it is expected to reproduce (tag, signature,
//! a seed orbit and its certified power-index shape, where known).
//!
//! The formulas are frozen as given; nothing is derived from
//! elliptic-curve multiplication at runtime.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::orbits::Progression;
use crate::portrait::{chebyshev_exception, MuTag, Weight};
use crate::qpoly::UniPoly;
use crate::ratmap::{ProjectivePoint, RationalMap};

pub use crate::portrait::chebyshev;

/// Expected power-index set of a seed orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexShape {
    pub exceptional: Vec<usize>,
    pub progressions: Vec<Progression>,
}

/// A family member plus everything the classification stack should
/// reproduce for it. The expectations are enforced in tests, not at
/// construction.
#[derive(Debug, Clone)]
pub struct FamilyInstance {
    pub name: &'static str,
    pub map: RationalMap,
    pub modulus: u32,
    /// None means the map is trivial (c x^j psi^m).
    pub expected_tag: Option<MuTag>,
    /// Orbifold signature, for the finite-quotient families.
    pub expected_signature: Option<Vec<Weight>>,
    /// A seed with known index-set shape, when the source pins one.
    pub seed: Option<ProjectivePoint>,
    pub expected_indices: Option<IndexShape>,
}

fn qi(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

fn lin(r: &BigRational) -> UniPoly {
    UniPoly::from_coeffs(vec![-r.clone(), BigRational::one()])
}

fn sig(values: &[u64]) -> Vec<Weight> {
    values.iter().map(|&v| Weight::Finite(v)).collect()
}

/// Lattes map of signature (2,4,4) and mu-type (13):
/// phi(x) = -(x - B)^2 / (4x).
pub fn lattes_244(b: &BigRational) -> Result<FamilyInstance> {
    if b.is_zero() {
        return Err(Error::ConstantMap);
    }
    let num = lin(b).pow(2).neg();
    let den = UniPoly::monomial(qi(4), 1);
    let map = RationalMap::new(&num, &den)?;
    let pinned = *b == qi(-3);
    Ok(FamilyInstance {
        name: "lattes244",
        map,
        modulus: 4,
        expected_tag: Some(MuTag::T13),
        expected_signature: Some(sig(&[2, 4, 4])),
        seed: pinned.then(|| ProjectivePoint::from_int(-1)),
        expected_indices: pinned.then(|| IndexShape {
            exceptional: vec![],
            progressions: vec![Progression {
                offset: 1,
                modulus: 2,
            }],
        }),
    })
}

/// Lattes map of signature (3,3,3) and mu-type (2,1): a simple fixed
/// point at infinity and the 2-cycle {0, 2B}:
/// phi(x) = (x - 2B)(x + 2B)^3 / (8 (x - B)^3).
pub fn lattes_333_fixed2cycle(b: &BigRational) -> Result<FamilyInstance> {
    if b.is_zero() {
        return Err(Error::ConstantMap);
    }
    let two_b = qi(2) * b;
    let num = lin(&two_b).mul(&lin(&-&two_b).pow(3));
    let den = lin(b).pow(3).scale(&qi(8));
    let map = RationalMap::new(&num, &den)?;
    let pinned = *b == qi(1);
    Ok(FamilyInstance {
        name: "lattes333-fixed2cycle",
        map,
        modulus: 3,
        expected_tag: Some(MuTag::T21),
        expected_signature: Some(sig(&[3, 3, 3])),
        seed: pinned.then(|| ProjectivePoint::from_int(-1)),
        expected_indices: pinned.then(|| IndexShape {
            exceptional: vec![],
            progressions: vec![Progression {
                offset: 0,
                modulus: 2,
            }],
        }),
    })
}

/// Lattes map of signature (3,3,3) and mu-type (4): the post-critical
/// 3-cycle 0 -> infinity -> 2B -> 0:
/// phi(x) = 2B (x - 2B)(x + 2B)^3 / (x (x - 4B)^3).
pub fn lattes_333_3cycle(b: &BigRational) -> Result<FamilyInstance> {
    if b.is_zero() {
        return Err(Error::ConstantMap);
    }
    let two_b = qi(2) * b;
    let four_b = qi(4) * b;
    let num = lin(&two_b).mul(&lin(&-&two_b).pow(3)).scale(&two_b);
    let den = UniPoly::x().mul(&lin(&four_b).pow(3));
    let map = RationalMap::new(&num, &den)?;
    let pinned = *b == qi(1);
    Ok(FamilyInstance {
        name: "lattes333-3cycle",
        map,
        modulus: 3,
        expected_tag: Some(MuTag::T4),
        expected_signature: Some(sig(&[3, 3, 3])),
        seed: pinned.then(|| ProjectivePoint::from_int(6)),
        expected_indices: pinned.then(|| IndexShape {
            exceptional: vec![],
            progressions: vec![Progression {
                offset: 2,
                modulus: 3,
            }],
        }),
    })
}

/// Degree-9 Lattes map of signature (3,3,3) and mu-type (9):
/// phi(x) = (x^3 + 6Bx^2 - 24B^2 x + 8B^3)^3
///        / (27 x (x - 2B)(x^2 - 2Bx + 4B^2)^3).
pub fn lattes_333_deg9(b: &BigRational) -> Result<FamilyInstance> {
    if b.is_zero() {
        return Err(Error::ConstantMap);
    }
    let b2 = b * b;
    let b3 = &b2 * b;
    let cubic = UniPoly::from_coeffs(vec![
        qi(8) * &b3,
        qi(-24) * &b2,
        qi(6) * b,
        BigRational::one(),
    ]);
    let quad = UniPoly::from_coeffs(vec![qi(4) * &b2, qi(-2) * b, BigRational::one()]);
    let num = cubic.pow(3);
    let den = UniPoly::x()
        .mul(&lin(&(qi(2) * b)))
        .mul(&quad.pow(3))
        .scale(&qi(27));
    let map = RationalMap::new(&num, &den)?;
    let pinned = *b == qi(3);
    Ok(FamilyInstance {
        name: "lattes333-deg9",
        map,
        modulus: 3,
        expected_tag: Some(MuTag::T9),
        expected_signature: Some(sig(&[3, 3, 3])),
        seed: pinned.then(|| ProjectivePoint::from_int(18)),
        expected_indices: pinned.then(|| IndexShape {
            exceptional: vec![],
            progressions: vec![Progression {
                offset: 1,
                modulus: 1,
            }],
        }),
    })
}

/// mu-type (3) family with post-critical 3-cycle infinity -> 0 -> C:
/// phi(x) = -C^2 (4x - (C+1)^2)^2 / ((x - C)(4Cx - (C+1)^2)^2),
/// requiring C outside {-1, -1/3, 0, 1}.
pub fn family_type3(c: &BigRational) -> Result<FamilyInstance> {
    for bad in [qi(-1), BigRational::new(BigInt::from(-1), BigInt::from(3)), qi(0), qi(1)] {
        if *c == bad {
            return Err(Error::InvalidParameter(format!(
                "type3 family requires C outside {{-1, -1/3, 0, 1}}, got {c}"
            )));
        }
    }
    let c1_sq = (c + BigRational::one()) * (c + BigRational::one());
    let num = UniPoly::from_coeffs(vec![-&c1_sq, qi(4)])
        .pow(2)
        .scale(&-(c * c));
    let den = lin(c).mul(&UniPoly::from_coeffs(vec![-&c1_sq, qi(4) * c]).pow(2));
    let map = RationalMap::new(&num, &den)?;
    let (seed, expected_indices) = if *c == qi(3) {
        (
            Some(ProjectivePoint::from_int(1)),
            Some(IndexShape {
                exceptional: vec![],
                progressions: vec![Progression {
                    offset: 0,
                    modulus: 3,
                }],
            }),
        )
    } else if *c == qi(2) {
        (
            Some(ProjectivePoint::from_int(4)),
            Some(IndexShape {
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
            }),
        )
    } else {
        (None, None)
    };
    Ok(FamilyInstance {
        name: "type3",
        map,
        modulus: 2,
        expected_tag: Some(MuTag::T3),
        expected_signature: None,
        seed,
        expected_indices,
    })
}

/// The fourth critical point of the type3 family: (3C^2 + 2C - 1)/4.
pub fn family_type3_free_critical_point(c: &BigRational) -> BigRational {
    (qi(3) * c * c + qi(2) * c - BigRational::one()) / qi(4)
}

/// mu-type (7,6) family, the unique one over Q whose seed orbit needs
/// three arithmetic progressions:
/// phi(x) = 144 t^2 x (x + 3t^2) / (x - 9t^2)^2.
pub fn family_type76(t: &BigRational) -> Result<FamilyInstance> {
    if t.is_zero() {
        return Err(Error::InvalidParameter(
            "type76 family requires t != 0".into(),
        ));
    }
    let t2 = t * t;
    let num = UniPoly::x()
        .mul(&lin(&(qi(-3) * &t2)))
        .scale(&(qi(144) * &t2));
    let den = lin(&(qi(9) * &t2)).pow(2);
    let map = RationalMap::new(&num, &den)?;
    let seed = ProjectivePoint::from_rational(&t2);
    Ok(FamilyInstance {
        name: "type76",
        map,
        modulus: 2,
        expected_tag: Some(MuTag::T76),
        expected_signature: None,
        seed: Some(seed),
        expected_indices: Some(IndexShape {
            exceptional: vec![0, 2],
            progressions: vec![Progression {
                offset: 1,
                modulus: 2,
            }],
        }),
    })
}

/// mu-type (8) family: phi(x) = 4C(C - s)(x - C)/(x - s)^2. phi is not
/// a square in Q(x) but phi^2 is, whenever s - C is a square.
pub fn family_mu8(c: &BigRational, s: &BigRational) -> Result<FamilyInstance> {
    if c.is_zero() || c == s {
        return Err(Error::InvalidParameter(
            "mu8 family requires C != 0 and C != s".into(),
        ));
    }
    let scale = qi(4) * c * (c - s);
    let num = lin(c).scale(&scale);
    let den = lin(s).pow(2);
    let map = RationalMap::new(&num, &den)?;
    Ok(FamilyInstance {
        name: "mu8",
        map,
        modulus: 2,
        expected_tag: Some(MuTag::T8),
        expected_signature: None,
        seed: None,
        expected_indices: None,
    })
}

/// Trivial map c x^j (psi_num/psi_den)^m.
pub fn trivial_family(
    c: &BigRational,
    j: u32,
    m: u32,
    psi_num: &UniPoly,
    psi_den: &UniPoly,
) -> Result<FamilyInstance> {
    assert!(j < m, "trivial form has 0 <= j <= m-1");
    if c.is_zero() || psi_num.is_zero() || psi_den.is_zero() {
        return Err(Error::ZeroMap);
    }
    let num = UniPoly::monomial(c.clone(), j as usize).mul(&psi_num.pow(m));
    let den = psi_den.pow(m);
    let map = RationalMap::new(&num, &den)?;
    Ok(FamilyInstance {
        name: "trivial",
        map,
        modulus: m,
        expected_tag: None,
        expected_signature: None,
        seed: None,
        expected_indices: None,
    })
}

/// The Chebyshev-exception polynomial (-1)^d T_d(x+2) - 2 as a map.
pub fn chebyshev_exception_map(d: u32) -> Result<FamilyInstance> {
    let map = RationalMap::from_polynomial(&chebyshev_exception(d))?;
    Ok(FamilyInstance {
        name: "cheb-exception",
        map,
        modulus: 2,
        expected_tag: None,
        expected_signature: None,
        seed: None,
        expected_indices: None,
    })
}

/// Build a family member by name with positional rational parameters
/// (the CLI front end).
pub fn by_name(name: &str, params: &[BigRational]) -> Result<FamilyInstance> {
    let need = |k: usize| -> Result<()> {
        if params.len() == k {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "family {name} takes {k} parameter(s), got {}",
                params.len()
            )))
        }
    };
    match name {
        "lattes244" => {
            need(1)?;
            lattes_244(&params[0])
        }
        "lattes333-fixed2cycle" => {
            need(1)?;
            lattes_333_fixed2cycle(&params[0])
        }
        "lattes333-3cycle" => {
            need(1)?;
            lattes_333_3cycle(&params[0])
        }
        "lattes333-deg9" => {
            need(1)?;
            lattes_333_deg9(&params[0])
        }
        "type3" => {
            need(1)?;
            family_type3(&params[0])
        }
        "type76" => {
            need(1)?;
            family_type76(&params[0])
        }
        "mu8" => {
            need(2)?;
            family_mu8(&params[0], &params[1])
        }
        "cheb-exception" => {
            need(1)?;
            let d = params[0]
                .to_integer()
                .try_into()
                .ok()
                .filter(|&d: &u32| d >= 2 && params[0].is_integer())
                .ok_or_else(|| {
                    Error::InvalidParameter("cheb-exception needs an integer degree >= 2".into())
                })?;
            chebyshev_exception_map(d)
        }
        _ => Err(Error::InvalidParameter(format!("unknown family {name}"))),
    }
}

/// Names accepted by [`by_name`].
pub const FAMILY_NAMES: &[&str] = &[
    "lattes244",
    "lattes333-fixed2cycle",
    "lattes333-3cycle",
    "lattes333-deg9",
    "type3",
    "type76",
    "mu8",
    "cheb-exception",
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmap::IterateBudget;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn lattes_244_formulas() {
        let fam = lattes_244(&qi(-3)).unwrap();
        // equals phi1 = -(x+3)^2/(4x)
        let phi1 = RationalMap::new(
            &UniPoly::from_ints(&[-9, -6, -1]),
            &UniPoly::from_ints(&[0, 4]),
        )
        .unwrap();
        assert_eq!(fam.map, phi1);
        // phi^2 = (x + B)^4 / (16 x (x - B)^2) with B = -3
        let it = fam.map.iterate(2, &IterateBudget::default()).unwrap();
        let num = UniPoly::from_ints(&[-3, 1]).pow(4);
        let den = UniPoly::from_ints(&[0, 16]).mul(&UniPoly::from_ints(&[3, 1]).pow(2));
        assert_eq!(it, RationalMap::new(&num, &den).unwrap());
        // scaling x -> cx sends the B = -3 member to the B = -3c member
        let mu = RationalMap::moebius(2, 0, 0, 1).unwrap();
        let conj = fam.map.conjugate(&mu).unwrap();
        assert_eq!(conj, lattes_244(&qi(-6)).unwrap().map);
    }

    #[test]
    fn lattes_333_fixed2cycle_structure() {
        let fam = lattes_333_fixed2cycle(&qi(1)).unwrap();
        let m = &fam.map;
        assert_eq!(m.degree(), 4);
        // fixed point at infinity, 2-cycle {0, 2}
        assert!(m.eval(&ProjectivePoint::infinity()).is_infinity());
        assert_eq!(m.eval(&ProjectivePoint::from_int(0)), ProjectivePoint::from_int(2));
        assert_eq!(m.eval(&ProjectivePoint::from_int(2)), ProjectivePoint::from_int(0));
        // critical points 1, 4, -2, each of multiplicity 3
        for c in [1i64, 4, -2] {
            assert_eq!(m.ram_index_at(&ProjectivePoint::from_int(c)), 3);
        }
    }

    #[test]
    fn lattes_333_3cycle_values() {
        let fam = lattes_333_3cycle(&qi(1)).unwrap();
        // phi(6) = 256/3 = (4/3) * 4^3
        assert_eq!(
            fam.map.eval(&ProjectivePoint::from_int(6)).to_rational(),
            Some(q(256, 3))
        );
        // 3-cycle 0 -> inf -> 2 -> 0
        assert!(fam.map.eval(&ProjectivePoint::from_int(0)).is_infinity());
        assert_eq!(
            fam.map.eval(&ProjectivePoint::infinity()),
            ProjectivePoint::from_int(2)
        );
        assert_eq!(
            fam.map.eval(&ProjectivePoint::from_int(2)),
            ProjectivePoint::from_int(0)
        );
    }

    #[test]
    fn lattes_333_deg9_values() {
        let fam = lattes_333_deg9(&qi(3)).unwrap();
        assert_eq!(fam.map.degree(), 9);
        // phi(18) = (37/21)^3
        let v = fam.map.eval(&ProjectivePoint::from_int(18)).to_rational().unwrap();
        assert_eq!(v, q(37, 21) * q(37, 21) * q(37, 21));
    }

    #[test]
    fn type3_matches_phi3() {
        let fam = family_type3(&qi(3)).unwrap();
        let num = UniPoly::from_ints(&[-4, 1]).pow(2).scale(&q(-9, 1));
        let den = UniPoly::from_ints(&[-3, 1]).mul(&UniPoly::from_ints(&[-4, 3]).pow(2));
        assert_eq!(fam.map, RationalMap::new(&num, &den).unwrap());
        // fourth critical point gamma = 8 for C = 3, and it is critical
        assert_eq!(family_type3_free_critical_point(&qi(3)), qi(8));
        assert_eq!(fam.map.ram_index_at(&ProjectivePoint::from_int(8)), 2);
        // excluded parameters
        for c in [qi(-1), q(-1, 3), qi(0), qi(1)] {
            assert!(family_type3(&c).is_err());
        }
    }

    #[test]
    fn type76_orbit_prefix_and_class() {
        let fam = family_type76(&qi(1)).unwrap();
        let b = crate::orbits::OrbitBudget::default();
        let rec = crate::orbits::orbit(&fam.map, &ProjectivePoint::from_int(1), 4, &b);
        assert_eq!(rec.points[1], ProjectivePoint::from_int(9));
        assert!(rec.points[2].is_infinity());
        assert_eq!(rec.points[3], ProjectivePoint::from_int(144));
        // phi^4(1) = 3 (112/15)^2: the printed value in the source has a
        // typo; the exact evaluation pins 12544/75, and in particular
        // the value is 3 times a square.
        let v4 = rec.points[4].to_rational().unwrap();
        assert_eq!(v4, q(12544, 75));
        assert!(crate::arith::mth_root_rational(&(v4 / qi(3)), 2).is_some());
    }

    #[test]
    fn mu8_member() {
        let fam = family_mu8(&qi(1), &qi(2)).unwrap();
        let expect = RationalMap::new(
            &UniPoly::from_ints(&[4, -4]),
            &UniPoly::from_ints(&[4, -4, 1]),
        )
        .unwrap();
        assert_eq!(fam.map, expect);
    }

    #[test]
    fn trivial_family_examples() {
        // c x (x+1)^m
        let fam = trivial_family(&qi(5), 1, 3, &UniPoly::from_ints(&[1, 1]), &UniPoly::one())
            .unwrap();
        assert!(crate::portrait::is_trivial(&fam.map, 3).is_some());
        // with j = 0 every image is c times an m-th power
        let fam = trivial_family(&qi(7), 0, 2, &UniPoly::from_ints(&[3, 0, 1]), &UniPoly::one())
            .unwrap();
        for a in [-2i64, 0, 1, 5] {
            let v = fam.map.eval(&ProjectivePoint::from_int(a)).to_rational().unwrap();
            assert!(crate::arith::mth_root_rational(&(v / qi(7)), 2).is_some());
        }
    }

    #[test]
    fn by_name_round_trip() {
        for name in FAMILY_NAMES {
            let params: Vec<BigRational> = match *name {
                "mu8" => vec![qi(1), qi(2)],
                "cheb-exception" => vec![qi(3)],
                "lattes244" => vec![qi(-3)],
                _ => vec![qi(3)],
            };
            let fam = by_name(name, &params).unwrap();
            assert!(fam.map.degree() >= 2);
        }
        assert!(by_name("nope", &[qi(1)]).is_err());
        assert!(by_name("type3", &[]).is_err());
    }
}
