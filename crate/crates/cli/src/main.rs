//! Command-line front end: exact analysis of rational self-maps of
//! P^1 over Q. Output is line-delimited JSON (schema field "dynpow/1")
//! unless --pretty is given; identical inputs produce byte-identical
//! output. Exit codes: 0 success, 2 usage/input error, 3 resource
//! budget exceeded.

mod parser;

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use serde_json::{json, Value};

use dynpow_core::arith::FactorBudget;
use dynpow_core::families;
use dynpow_core::genus::{dichotomy_report, genus_of_cn, rho_n, GenusVerdict};
use dynpow_core::orbits::{
    certify_progressions, is_power_point, needs_more_than, orbit, CertifyOutcome, OrbitBudget,
};
use dynpow_core::portrait::{
    classify_mu_type, exceptional_points, orbifold_signature, Case5Form, MuType, PointSet,
    PortraitBudget, Weight,
};
use dynpow_core::powerclass::{
    find_relation, power_part, reduce_class, PowerClass, RelationSearch,
};
use dynpow_core::ratmap::{IterateBudget, ProjectivePoint, RationalMap};
use dynpow_core::Error as CoreError;

const SCHEMA: &str = "dynpow/1";

#[derive(Parser)]
#[command(
    name = "dynpow",
    version,
    about = "Exact arithmetic of rational-map orbits over Q: genus tables, power classes, classification, certified power-index progressions"
)]
struct Cli {
    /// Line-delimited JSON output (the default).
    #[arg(long, global = true)]
    json: bool,
    /// Human-readable output instead of JSON.
    #[arg(long, global = true, conflicts_with = "json")]
    pretty: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a map at a point of P^1(Q).
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        /// Point: p/q, integer, or inf.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Print the n-th iterate in canonical form.
    Iterate {
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 4096)]
        budget_degree: u64,
    },
    /// Critical layers, ramification indices, and the index at infinity.
    Critical {
        #[arg(long, allow_hyphen_values = true)]
        map: String,
    },
    /// Genus of C_n : y^m = phi^n(x) for a range of n, with the
    /// bounded-vs-growing verdict.
    Genus {
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        #[arg(long)]
        m: u32,
        /// Single index or inclusive range, e.g. 3 or 1..5.
        #[arg(long)]
        n: String,
        #[arg(long, default_value_t = 4096)]
        budget_degree: u64,
    },
    /// rho_n(0) + rho_n(infinity) counts.
    Rho {
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: String,
        #[arg(long, default_value_t = 4096)]
        budget_degree: u64,
    },
    /// Mu-type classification, orbifold signature, normal form.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        #[arg(long)]
        m: u32,
    },
    /// Split a polynomial as h = f * g^m with g of maximal degree.
    Powerpart {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long)]
        m: u32,
    },
    /// Class of a rational function in Q(x)*/Q(x)*^m.
    ReduceClass {
        /// Rational function expression (any nonzero degree).
        #[arg(long = "fn", allow_hyphen_values = true)]
        func: String,
        #[arg(long)]
        m: u32,
    },
    /// Search for phi^r = phi^s psi^m with verified witness.
    FindRelation {
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 2)]
        s_max: u32,
        /// Defaults to m for m >= 3 and 4 for m = 2.
        #[arg(long)]
        delta_max: Option<u32>,
        #[arg(long, default_value_t = 4096)]
        budget_degree: u64,
    },
    /// Exact orbit, with m-th power membership when --m is given.
    Orbit {
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        m: Option<u32>,
        /// Also certify the power-index set (requires --m).
        #[arg(long, requires = "m")]
        certify: bool,
        #[arg(long, default_value_t = 100_000)]
        budget_bits: u64,
    },
    /// Certify { n : phi^n(a) is an m-th power } as progressions.
    Certify {
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long)]
        m: u32,
        /// Cross-validation horizon.
        #[arg(long = "N", default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        budget_bits: u64,
    },
    /// Instantiate a built-in family with expected metadata.
    Family {
        #[arg(long)]
        name: String,
        /// Comma-separated rational parameters, e.g. -3 or 1,2.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        params: String,
    },
    /// Riemann-Hurwitz accounting for a map.
    CheckRh {
        #[arg(long, allow_hyphen_values = true)]
        map: String,
    },
}

struct Out {
    pretty: bool,
}

impl Out {
    fn emit(&self, mut obj: Value, pretty_line: String) {
        if self.pretty {
            println!("{pretty_line}");
        } else {
            let map = obj.as_object_mut().expect("emit takes objects");
            map.insert("schema".into(), json!(SCHEMA));
            println!("{}", serde_json::to_string(&obj).unwrap());
        }
    }
}

fn rational_str(q: &BigRational) -> String {
    if q.denom() == &num_bigint::BigInt::from(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn weight_json(w: &Weight) -> Value {
    match w {
        Weight::Finite(v) => json!(v),
        Weight::Infinite => json!("inf"),
    }
}

fn signature_strs(sig: &[Weight]) -> Vec<Value> {
    sig.iter().map(weight_json).collect()
}

fn class_json(class: &PowerClass) -> Value {
    json!({
        "m": class.modulus(),
        "unit": rational_str(class.unit()),
        "factors": class
            .factors()
            .iter()
            .map(|(e, f)| json!({"exponent": e, "factor": f.to_string()}))
            .collect::<Vec<_>>(),
        "trivial": class.is_trivial(),
    })
}

fn point_set_str(s: &PointSet) -> String {
    match s {
        PointSet::Finite(p) => p.to_string(),
        PointSet::Infinity => "inf".into(),
    }
}

fn case5_json(c: &Case5Form) -> Value {
    json!({
        "case": c.kind.to_string(),
        "B": rational_str(&c.b),
        "C": rational_str(&c.c),
        "f": c.f.to_string(),
        "g": c.g.to_string(),
        "h": c.h.to_string(),
        "swapped": c.swapped,
    })
}

fn parse_range(text: &str) -> Result<(u32, u32), String> {
    if let Some((a, b)) = text.split_once("..") {
        let lo: u32 = a.trim().parse().map_err(|_| format!("bad range '{text}'"))?;
        let hi: u32 = b.trim().parse().map_err(|_| format!("bad range '{text}'"))?;
        if lo == 0 || hi < lo {
            return Err(format!("bad range '{text}'"));
        }
        Ok((lo, hi))
    } else {
        let n: u32 = text.trim().parse().map_err(|_| format!("bad index '{text}'"))?;
        if n == 0 {
            return Err("n must be >= 1".into());
        }
        Ok((n, n))
    }
}

enum CliError {
    Usage(String),
    Budget(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::DegreeBudget { .. }
            | CoreError::BitBudget { .. }
            | CoreError::Unfactored { .. } => CliError::Budget(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<parser::ParseError> for CliError {
    fn from(e: parser::ParseError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<String> for CliError {
    fn from(s: String) -> Self {
        CliError::Usage(s)
    }
}

fn main() {
    let cli = Cli::parse();
    let out = Out { pretty: cli.pretty };
    match run(&out, cli.cmd) {
        Ok(()) => {}
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(CliError::Budget(msg)) => {
            out.emit(
                json!({"op": "error", "kind": "budget", "message": msg}),
                format!("budget exceeded: {msg}"),
            );
            std::process::exit(3);
        }
    }
}

fn run(out: &Out, cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Eval { map, at } => {
            let phi = parser::parse_map(&map)?;
            let p = parser::parse_point(&at)?;
            let v = phi.eval(&p);
            out.emit(
                json!({"op": "eval", "map": phi.to_string(), "at": p.to_string(), "value": v.to_string()}),
                format!("phi({p}) = {v}"),
            );
            Ok(())
        }
        Cmd::Iterate {
            map,
            n,
            budget_degree,
        } => {
            let phi = parser::parse_map(&map)?;
            let it = phi.iterate(n, &IterateBudget { max_degree: budget_degree })?;
            out.emit(
                json!({"op": "iterate", "n": n, "degree": it.degree(), "map": it.to_string()}),
                format!("phi^{n} = {it}"),
            );
            Ok(())
        }
        Cmd::Critical { map } => {
            let phi = parser::parse_map(&map)?;
            let ram = phi.ramification();
            for (e, set) in ram.critical_sets() {
                out.emit(
                    json!({"op": "critical", "set": set.to_string(), "points": set.deg(), "ram_index": e}),
                    format!("critical set {set} ({} point(s)), e = {e}", set.deg()),
                );
            }
            out.emit(
                json!({"op": "critical-infinity", "ram_index": ram.infinity_index}),
                format!("e(inf) = {}", ram.infinity_index),
            );
            Ok(())
        }
        Cmd::Genus {
            map,
            m,
            n,
            budget_degree,
        } => {
            let phi = parser::parse_map(&map)?;
            let (lo, hi) = parse_range(&n)?;
            let mut search = RelationSearch::for_modulus(m);
            search.degree_budget = IterateBudget { max_degree: budget_degree };
            if hi >= 2 {
                let report = dichotomy_report(&phi, m, hi, &search)?;
                for row in report.rows.iter().filter(|r| r.n >= lo) {
                    out.emit(
                        json!({"op": "genus", "n": row.n, "m": m, "genus": row.genus,
                               "rho": row.rho, "lower": row.lower, "upper": row.upper}),
                        format!(
                            "n = {}: genus {} (rho {}, bounds [{}, {}])",
                            row.n, row.genus, row.rho, row.lower, row.upper
                        ),
                    );
                }
                match report.verdict {
                    GenusVerdict::Bounded(rel) => out.emit(
                        json!({"op": "genus-verdict", "verdict": "bounded",
                               "relation": {"r": rel.r, "s": rel.s,
                                            "psi": format!("({})/({})", rel.psi_num, rel.psi_den)}}),
                        format!("verdict: bounded (phi^{} = phi^{} psi^{m})", rel.r, rel.s),
                    ),
                    GenusVerdict::Growing { ratios } => out.emit(
                        json!({"op": "genus-verdict", "verdict": "growing",
                               "ratios": ratios.iter()
                                   .map(|(n, r)| json!({"n": n, "ratio": rational_str(r)}))
                                   .collect::<Vec<_>>()}),
                        "verdict: growing within the computed range".into(),
                    ),
                }
            } else {
                let g = genus_of_cn(&phi, m, lo, &search.degree_budget)?;
                out.emit(
                    json!({"op": "genus", "n": lo, "m": m, "genus": g}),
                    format!("n = {lo}: genus {g}"),
                );
            }
            Ok(())
        }
        Cmd::Rho {
            map,
            m,
            n,
            budget_degree,
        } => {
            let phi = parser::parse_map(&map)?;
            let (lo, hi) = parse_range(&n)?;
            let budget = IterateBudget { max_degree: budget_degree };
            for k in lo..=hi {
                let r = rho_n(&phi, m, k, &budget)?;
                out.emit(
                    json!({"op": "rho", "n": k, "m": m, "rho": r.total, "finite": r.finite,
                           "infinity_counted": r.infinity_counted,
                           "detail": r.detail.iter()
                               .map(|(e, d)| json!({"exponent": e, "points": d}))
                               .collect::<Vec<_>>()}),
                    format!("n = {k}: rho = {} ({} finite{})", r.total, r.finite,
                            if r.infinity_counted { " + infinity" } else { "" }),
                );
            }
            Ok(())
        }
        Cmd::Classify { map, m } => {
            let phi = parser::parse_map(&map)?;
            let mu = classify_mu_type(&phi, m);
            let sig = orbifold_signature(&phi, &PortraitBudget::default());
            let sig_json = sig
                .as_ref()
                .map(|s| Value::Array(signature_strs(s)))
                .unwrap_or(Value::Null);
            match mu {
                MuType::Trivial(t) => out.emit(
                    json!({"op": "classify", "m": m, "type": "trivial",
                           "c": rational_str(&t.c), "j": t.j,
                           "psi": format!("({})/({})", t.psi_num, t.psi_den),
                           "signature": sig_json}),
                    format!("trivial: c = {}, j = {}, psi = ({})/({})",
                            rational_str(&t.c), t.j, t.psi_num, t.psi_den),
                ),
                MuType::Tagged {
                    tag,
                    m,
                    swapped,
                    named,
                    case5,
                } => out.emit(
                    json!({"op": "classify", "m": m, "type": "tagged", "tag": tag.to_string(),
                           "swapped": swapped,
                           "named": named.iter()
                               .map(|(k, v)| json!({"name": k, "set": point_set_str(v)}))
                               .collect::<Vec<_>>(),
                           "case5": case5.as_ref().map(case5_json).unwrap_or(Value::Null),
                           "signature": sig_json}),
                    format!("mu-type {tag}{}", if swapped { " (after x -> 1/x)" } else { "" }),
                ),
                MuType::Unclassified(rep) => out.emit(
                    json!({"op": "classify", "m": m, "type": "unclassified",
                           "nd_zero": rep.nd_zero.0.iter()
                               .map(|(e, f)| json!({"exponent": e, "set": f.to_string()}))
                               .collect::<Vec<_>>(),
                           "nd_zero_infinity": rep.nd_zero.1,
                           "nd_infinity": rep.nd_infinity.0.iter()
                               .map(|(e, f)| json!({"exponent": e, "set": f.to_string()}))
                               .collect::<Vec<_>>(),
                           "nd_infinity_infinity": rep.nd_infinity.1,
                           "image_zero": rep.image_zero.to_string(),
                           "image_infinity": rep.image_infinity.to_string(),
                           "signature": sig_json}),
                    "unclassified: {0, infinity} is not a non-trivial abundant pair".into(),
                ),
            }
            Ok(())
        }
        Cmd::Powerpart { poly, m } => {
            let f = parser::parse_function(&poly)?;
            let p = f
                .into_polynomial()
                .ok_or_else(|| CliError::Usage("powerpart expects a polynomial".into()))?;
            if p.is_zero() {
                return Err(CliError::Usage("powerpart expects a nonzero polynomial".into()));
            }
            let (fpart, gpart) = power_part(&p, m);
            out.emit(
                json!({"op": "powerpart", "m": m, "f": fpart.to_string(), "g": gpart.to_string()}),
                format!("h = ({fpart}) * ({gpart})^{m}"),
            );
            Ok(())
        }
        Cmd::ReduceClass { func, m } => {
            let f = parser::parse_function(&func)?;
            let (num, den) = f.reduced();
            if num.is_zero() {
                return Err(CliError::Usage("cannot reduce the zero function".into()));
            }
            let red = reduce_class(&num, &den, m);
            out.emit(
                json!({"op": "reduce-class", "class": class_json(&red.class),
                       "psi": format!("({})/({})", red.psi_num, red.psi_den)}),
                format!("class: {:?}, psi = ({})/({})", red.class, red.psi_num, red.psi_den),
            );
            Ok(())
        }
        Cmd::FindRelation {
            map,
            m,
            s_max,
            delta_max,
            budget_degree,
        } => {
            let phi = parser::parse_map(&map)?;
            let mut search = RelationSearch::for_modulus(m);
            search.s_max = s_max;
            if let Some(d) = delta_max {
                search.delta_max = d;
            }
            search.degree_budget = IterateBudget { max_degree: budget_degree };
            match find_relation(&phi, m, &search)? {
                Some(rel) => out.emit(
                    json!({"op": "find-relation", "m": m, "found": true, "r": rel.r, "s": rel.s,
                           "psi": format!("({})/({})", rel.psi_num, rel.psi_den)}),
                    format!("phi^{} = phi^{} * psi^{m} with psi = ({})/({})",
                            rel.r, rel.s, rel.psi_num, rel.psi_den),
                ),
                None => out.emit(
                    json!({"op": "find-relation", "m": m, "found": false}),
                    "no iterate relation within the search bounds".into(),
                ),
            }
            Ok(())
        }
        Cmd::Orbit {
            map,
            start,
            n,
            m,
            certify,
            budget_bits,
        } => {
            let phi = parser::parse_map(&map)?;
            let a = parser::parse_point(&start)?;
            let budget = OrbitBudget { max_bits: budget_bits };
            let rec = orbit(&phi, &a, n, &budget);
            for k in 0..=n {
                match rec.value_at(k) {
                    Some(p) => {
                        let member = m.map(|m| is_power_point(p, m));
                        out.emit(
                            json!({"op": "orbit", "n": k, "value": p.to_string(),
                                   "member": member.map(Value::from).unwrap_or(Value::Null)}),
                            format!(
                                "n = {k}: {p}{}",
                                match member {
                                    Some(true) => "  [power]",
                                    _ => "",
                                }
                            ),
                        );
                    }
                    None => {
                        return Err(CliError::Budget(format!(
                            "orbit coordinate bits exceed budget {budget_bits} before n = {k}"
                        )))
                    }
                }
            }
            if let Some((tail, cycle)) = rec.preperiod {
                out.emit(
                    json!({"op": "orbit-preperiod", "tail": tail, "cycle": cycle}),
                    format!("preperiodic: tail {tail}, cycle length {cycle}"),
                );
            }
            if certify {
                let m = m.expect("clap enforces --m with --certify");
                emit_certification(out, &phi, &a, m, n, budget_bits)?;
            }
            Ok(())
        }
        Cmd::Certify {
            map,
            start,
            m,
            n,
            budget_bits,
        } => {
            let phi = parser::parse_map(&map)?;
            let a = parser::parse_point(&start)?;
            emit_certification(out, &phi, &a, m, n, budget_bits)
        }
        Cmd::Family { name, params } => {
            let parsed: Vec<BigRational> = if params.trim().is_empty() {
                Vec::new()
            } else {
                params
                    .split(',')
                    .map(|s| parser::parse_rational(s).map_err(CliError::from))
                    .collect::<Result<_, _>>()?
            };
            let fam = families::by_name(&name, &parsed)?;
            out.emit(
                json!({"op": "family", "name": fam.name, "m": fam.modulus,
                       "map": fam.map.to_string(),
                       "expected_tag": fam.expected_tag.map(|t| t.to_string()),
                       "expected_signature": fam.expected_signature.as_ref()
                           .map(|s| Value::Array(signature_strs(s))).unwrap_or(Value::Null),
                       "seed": fam.seed.as_ref().map(|s| s.to_string()),
                       "expected_indices": fam.expected_indices.as_ref().map(|ix| json!({
                           "exceptional": ix.exceptional,
                           "progressions": ix.progressions.iter()
                               .map(|p| json!({"offset": p.offset, "modulus": p.modulus}))
                               .collect::<Vec<_>>(),
                       })).unwrap_or(Value::Null)}),
                format!("{}: {} (m = {})", fam.name, fam.map, fam.modulus),
            );
            Ok(())
        }
        Cmd::CheckRh { map } => {
            let phi = parser::parse_map(&map)?;
            let ram = phi.ramification();
            let expected = 2 * phi.degree() as u64 - 2;
            out.emit(
                json!({"op": "check-rh", "degree": phi.degree(),
                       "total_defect": ram.total_defect(), "expected": expected,
                       "holds": ram.riemann_hurwitz_holds(),
                       "exceptional_points": exceptional_points(&phi).iter()
                           .map(|p| p.to_string()).collect::<Vec<_>>()}),
                format!(
                    "sum (e-1) = {} = 2d-2 = {}: {}",
                    ram.total_defect(),
                    expected,
                    if ram.riemann_hurwitz_holds() { "ok" } else { "VIOLATED" }
                ),
            );
            Ok(())
        }
    }
}

fn emit_certification(
    out: &Out,
    phi: &RationalMap,
    a: &ProjectivePoint,
    m: u32,
    horizon: usize,
    budget_bits: u64,
) -> Result<(), CliError> {
    let outcome = certify_progressions(
        phi,
        a,
        m,
        horizon,
        &RelationSearch::for_modulus(m),
        &OrbitBudget { max_bits: budget_bits },
        &FactorBudget::default(),
    )?;
    match outcome {
        CertifyOutcome::Certified { set, relation } => {
            let minimal = {
                let max_mod = set
                    .progressions
                    .iter()
                    .map(|p| p.modulus)
                    .max()
                    .unwrap_or(1);
                let mut k = set.component_count();
                while k > 1 && !needs_more_than(&set, k - 1, max_mod.max(4)) {
                    k -= 1;
                }
                k
            };
            out.emit(
                json!({"op": "certify", "m": m, "certified": true,
                       "exceptional": set.exceptional,
                       "progressions": set.progressions.iter()
                           .map(|p| json!({"offset": p.offset, "modulus": p.modulus}))
                           .collect::<Vec<_>>(),
                       "verified_horizon": set.verified_horizon,
                       "minimal_progressions": minimal,
                       "relation": relation.map(|rel| json!({"r": rel.r, "s": rel.s}))
                           .unwrap_or(Value::Null)}),
                format!(
                    "certified: {{{}}} union {}",
                    set.exceptional
                        .iter()
                        .map(|n| n.to_string())
                        .collect::<Vec<_>>()
                        .join(", "),
                    set.progressions
                        .iter()
                        .map(|p| format!("{{{} + {}k}}", p.offset, p.modulus))
                        .collect::<Vec<_>>()
                        .join(" union ")
                ),
            );
        }
        CertifyOutcome::Uncertified { raw_indices, horizon } => {
            out.emit(
                json!({"op": "certify", "m": m, "certified": false,
                       "indices": raw_indices, "horizon": horizon}),
                format!("no certification (no iterate relation); members up to {horizon}: {raw_indices:?}"),
            );
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("3").unwrap(), (3, 3));
        assert_eq!(parse_range("1..5").unwrap(), (1, 5));
        assert!(parse_range("0").is_err());
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn case5_helper_emits_verifiable_form() {
        let phi = parser::parse_map("-9*(x-4)^2/((x-3)*(3*x-4)^2)").unwrap();
        let c5 = dynpow_core::portrait::verify_case5_form(&phi).unwrap();
        let v = case5_json(&c5);
        assert_eq!(v["case"], "5a");
        assert_eq!(v["C"], "3");
    }
}
