//! Critical and post-critical analysis: trivial-form detection,
//! exceptional points, post-critical portraits with orbifold weights,
//! mu-type classification, the m = 2 normal forms, the polynomial
//! classifier, and branch-abundance certification.
//!
//! Algebraic point sets are kept as squarefree Galois-stable
//! polynomials; nothing here factors a polynomial into irreducibles.
//! Node partitions are refined by (ramification index, image node)
//! until splitting is a no-op, which is what makes the orbifold weight
//! well-defined per node.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::powerclass::{find_relation, mth_root_function, IterateRelation, RelationSearch};
use crate::qpoly::{compose, low_degree_rational_roots, poly_gcd, yun_decompose, UniPoly};
use crate::ratmap::{ProjectivePoint, RationalMap};

/// Galois-stable finite subset of the projective line: a monic
/// squarefree polynomial's root set, or the point at infinity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum PointSet {
    Finite(UniPoly),
    Infinity,
}

impl std::fmt::Debug for PointSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PointSet::Finite(p) => write!(f, "Z({})", p),
            PointSet::Infinity => write!(f, "inf"),
        }
    }
}

impl PointSet {
    pub fn of_point(p: &ProjectivePoint) -> PointSet {
        match p.to_rational() {
            Some(q) => PointSet::Finite(UniPoly::from_coeffs(vec![-q, BigRational::one()])),
            None => PointSet::Infinity,
        }
    }

    /// Number of points in the set.
    pub fn size(&self) -> usize {
        match self {
            PointSet::Finite(p) => p.deg(),
            PointSet::Infinity => 1,
        }
    }

    pub fn contains(&self, p: &ProjectivePoint) -> bool {
        match (self, p.to_rational()) {
            (PointSet::Finite(f), Some(q)) => f.eval(&q).is_zero(),
            (PointSet::Infinity, None) => true,
            _ => false,
        }
    }

    /// The rational point, when the set is a single rational point.
    pub fn as_rational_point(&self) -> Option<ProjectivePoint> {
        match self {
            PointSet::Infinity => Some(ProjectivePoint::infinity()),
            PointSet::Finite(p) if p.deg() == 1 => {
                let r = -p.coeff(0) / p.coeff(1);
                Some(ProjectivePoint::from_rational(&r))
            }
            _ => None,
        }
    }
}

/// Full preimage decomposition of a single point: Yun layers of the
/// preimage polynomial (ramification index = layer multiplicity), plus
/// the index at infinity when infinity lies in the fiber.
#[derive(Debug, Clone)]
pub struct Fiber {
    pub layers: Vec<(u32, UniPoly)>,
    pub at_infinity: Option<u32>,
}

impl Fiber {
    /// Layers whose ramification index m does not divide, with the
    /// infinity entry kept separate.
    pub fn nondivisible(&self, m: u32) -> (Vec<(u32, UniPoly)>, Option<u32>) {
        let finite = self
            .layers
            .iter()
            .filter(|(e, _)| e % m != 0)
            .cloned()
            .collect();
        let inf = self.at_infinity.filter(|e| e % m != 0);
        (finite, inf)
    }
}

/// Preimage data source for the mu-type matcher. Implemented by
/// `RationalMap`; synthetic implementations drive the matcher over
/// structures that no map over Q realizes.
pub trait PreimageSource {
    fn map_degree(&self) -> usize;
    fn fiber_of(&self, v: &ProjectivePoint) -> Fiber;
    fn image_of(&self, v: &ProjectivePoint) -> ProjectivePoint;

    /// Every point of the (squarefree, possibly irrational) set has a
    /// fully m-divisible fiber. The default resolves rational points
    /// only; map-backed sources override with an exact pullback test.
    fn set_fibers_divisible(&self, set: &UniPoly, m: u32) -> bool {
        match low_degree_rational_roots(set) {
            Some(roots) if roots.len() == set.deg() => roots.iter().all(|r| {
                let f = self.fiber_of(&ProjectivePoint::from_rational(r));
                let (nd, inf) = f.nondivisible(m);
                nd.is_empty() && inf.is_none()
            }),
            _ => false,
        }
    }
}

impl PreimageSource for RationalMap {
    fn map_degree(&self) -> usize {
        self.degree()
    }

    fn fiber_of(&self, v: &ProjectivePoint) -> Fiber {
        let pre = self.preimage_poly(v);
        let layers = if pre.is_zero() || pre.is_constant() {
            Vec::new()
        } else {
            yun_decompose(&pre).factors
        };
        let at_infinity = (self.eval(&ProjectivePoint::infinity()) == *v)
            .then(|| self.ram_index_at(&ProjectivePoint::infinity()));
        Fiber {
            layers,
            at_infinity,
        }
    }

    fn image_of(&self, v: &ProjectivePoint) -> ProjectivePoint {
        self.eval(v)
    }

    fn set_fibers_divisible(&self, set: &UniPoly, m: u32) -> bool {
        // Multiplicity of w in set(phi) is exactly e_phi(w) for a
        // squarefree set, so the Yun layers of the pullback are the
        // ramification indices over the whole set.
        let pull = compose(set, self.num(), self.den()).0;
        if !pull.is_constant() {
            for (e, _) in yun_decompose(&pull).factors {
                if e % m != 0 {
                    return false;
                }
            }
        }
        let inf_image = self.eval(&ProjectivePoint::infinity());
        match inf_image.to_rational() {
            Some(q) if set.eval(&q).is_zero() => {
                self.ram_index_at(&ProjectivePoint::infinity()) % m == 0
            }
            _ => true,
        }
    }
}

// ---------------------------------------------------------------------------
// trivial maps

/// phi = c x^j psi(x)^m with 0 <= j <= m-1, verified exactly.
#[derive(Debug, Clone)]
pub struct TrivialDecomposition {
    pub c: BigRational,
    pub j: u32,
    pub psi_num: UniPoly,
    pub psi_den: UniPoly,
}

/// Decompose phi as c x^j psi^m; possible exactly when every zero and
/// pole away from {0, infinity} has multiplicity divisible by m.
pub fn is_trivial(phi: &RationalMap, m: u32) -> Option<TrivialDecomposition> {
    let zero = BigRational::zero();
    let ord_zero_num = if phi.num().eval(&zero).is_zero() {
        phi.num().valuation_at(&zero)
    } else {
        0
    };
    let ord_zero_den = if phi.den().eval(&zero).is_zero() {
        phi.den().valuation_at(&zero)
    } else {
        0
    };
    let x = UniPoly::x();
    let num_rest = phi.num().div_exact(&x.pow(ord_zero_num));
    let den_rest = phi.den().div_exact(&x.pow(ord_zero_den));
    let dn = yun_decompose(&num_rest);
    let dd = yun_decompose(&den_rest);
    if dn.factors.iter().any(|(e, _)| e % m != 0) || dd.factors.iter().any(|(e, _)| e % m != 0) {
        return None;
    }
    let c = dn.content / dd.content;
    let ord = i64::from(ord_zero_num) - i64::from(ord_zero_den);
    let j = ord.rem_euclid(i64::from(m)) as u32;
    let k = (ord - i64::from(j)) / i64::from(m);
    let mut psi_num = UniPoly::one();
    let mut psi_den = UniPoly::one();
    if k > 0 {
        psi_num = psi_num.mul(&x.pow(k as u32));
    } else if k < 0 {
        psi_den = psi_den.mul(&x.pow((-k) as u32));
    }
    for (e, f) in &dn.factors {
        psi_num = psi_num.mul(&f.pow(e / m));
    }
    for (e, f) in &dd.factors {
        psi_den = psi_den.mul(&f.pow(e / m));
    }
    let lhs = phi.num().mul(&psi_den.pow(m));
    let rhs = phi.den().mul(&x.pow(j)).mul(&psi_num.pow(m)).scale(&c);
    debug_assert_eq!(lhs, rhs, "trivial decomposition must verify");
    Some(TrivialDecomposition {
        c,
        j,
        psi_num,
        psi_den,
    })
}

// ---------------------------------------------------------------------------
// exceptional points

/// Points with finite backward orbit: totally ramified fixed points and
/// totally ramified 2-cycles over Q. At most two exist.
pub fn exceptional_points(phi: &RationalMap) -> Vec<ProjectivePoint> {
    let d = phi.degree() as u32;
    let ram = phi.ramification();
    let mut candidates = Vec::new();
    for (e, f) in ram.critical_sets() {
        if e == d {
            if let Some(roots) = low_degree_rational_roots(&f) {
                for r in roots {
                    candidates.push(ProjectivePoint::from_rational(&r));
                }
            }
        }
    }
    if ram.infinity_index == d {
        candidates.push(ProjectivePoint::infinity());
    }
    let mut out: Vec<ProjectivePoint> = Vec::new();
    for p in &candidates {
        let q = phi.eval(p);
        let exceptional = q == *p || (candidates.contains(&q) && phi.eval(&q) == *p);
        if exceptional && !out.contains(p) {
            out.push(p.clone());
        }
    }
    assert!(out.len() <= 2, "more than two exceptional points");
    out
}

// ---------------------------------------------------------------------------
// post-critical portrait

/// Budget for post-critical exploration: total universe degree,
/// pushforward depth, and coefficient size. Orbits of non-preperiodic
/// critical points double their height every step, so the bit cap is
/// what actually stops wandering maps.
#[derive(Debug, Clone, Copy)]
pub struct PortraitBudget {
    pub max_total_degree: usize,
    pub max_depth: usize,
    pub max_coeff_bits: u64,
}

impl Default for PortraitBudget {
    fn default() -> Self {
        PortraitBudget {
            max_total_degree: 64,
            max_depth: 32,
            max_coeff_bits: 2048,
        }
    }
}

fn poly_bits(p: &UniPoly) -> u64 {
    p.coeffs()
        .iter()
        .map(|c| c.numer().bits() + c.denom().bits())
        .max()
        .unwrap_or(0)
}

/// Orbifold weight value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Weight {
    Finite(u64),
    Infinite,
}

impl std::fmt::Display for Weight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Weight::Finite(v) => write!(f, "{}", v),
            Weight::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PortraitNode {
    pub set: PointSet,
    /// Uniform ramification index over the node.
    pub ram_index: u32,
    /// Image node; None only when the exploration was truncated.
    pub image: Option<usize>,
    /// Orbifold weight, when one was computed.
    pub weight: Option<Weight>,
}

/// Functional graph on the post-critical set, refined so each node has
/// a uniform ramification index and a single image node.
#[derive(Debug, Clone)]
pub struct PortraitGraph {
    pub nodes: Vec<PortraitNode>,
    /// True when the post-critical set stabilized within budget.
    pub pcf: bool,
    pub truncated: bool,
}

impl PortraitGraph {
    pub fn total_degree(&self) -> usize {
        self.nodes.iter().map(|n| n.set.size()).sum()
    }

    pub fn node_containing(&self, p: &ProjectivePoint) -> Option<usize> {
        self.nodes.iter().position(|n| n.set.contains(p))
    }

    /// True when splitting any node by (ramification index, image)
    /// changes nothing; checked directly against the map.
    pub fn is_refinement_fixpoint(&self, phi: &RationalMap) -> bool {
        for node in &self.nodes {
            let PointSet::Finite(p) = &node.set else {
                continue;
            };
            for (e, f) in phi.ramification().critical_sets() {
                let g = poly_gcd(p, &f);
                if !g.is_constant() && (g != *p || e != node.ram_index) && e != node.ram_index {
                    return false;
                }
                if !g.is_constant() && g != *p {
                    return false;
                }
            }
            if let Some(img) = node.image {
                let (fin, inf) = phi.pushforward(p);
                if inf && !matches!(self.nodes[img].set, PointSet::Infinity) {
                    return false;
                }
                if let Some(fp) = fin {
                    match &self.nodes[img].set {
                        PointSet::Finite(t) => {
                            if !fp.div_exact(&poly_gcd(&fp, t)).is_constant() {
                                return false;
                            }
                        }
                        PointSet::Infinity => return false,
                    }
                }
            }
        }
        true
    }
}

struct Universe {
    polys: Vec<UniPoly>,
    has_infinity: bool,
}

impl Universe {
    fn total_degree(&self) -> usize {
        self.polys.iter().map(|p| p.deg()).sum::<usize>() + usize::from(self.has_infinity)
    }

    /// Part of q's root set not already present; inserts and returns it.
    fn insert(&mut self, q: &UniPoly) -> Option<UniPoly> {
        let mut fresh = q.monic();
        for p in &self.polys {
            let g = poly_gcd(&fresh, p);
            if !g.is_constant() {
                fresh = fresh.div_exact(&g).monic();
            }
            if fresh.is_constant() {
                return None;
            }
        }
        self.polys.push(fresh.clone());
        Some(fresh)
    }
}

fn linear_of(v: &ProjectivePoint) -> Option<UniPoly> {
    v.to_rational()
        .map(|q| UniPoly::from_coeffs(vec![-q, BigRational::one()]))
}

/// Post-critical set exploration plus (e, image) refinement.
pub fn postcritical_graph(phi: &RationalMap, budget: &PortraitBudget) -> PortraitGraph {
    let ram = phi.ramification();
    let mut universe = Universe {
        polys: Vec::new(),
        has_infinity: false,
    };
    let mut frontier: Vec<PointSet> = Vec::new();
    fn push_value(
        universe: &mut Universe,
        frontier: &mut Vec<PointSet>,
        set: Option<UniPoly>,
        inf: bool,
    ) {
        if let Some(p) = set {
            if let Some(fresh) = universe.insert(&p) {
                frontier.push(PointSet::Finite(fresh));
            }
        }
        if inf && !universe.has_infinity {
            universe.has_infinity = true;
            frontier.push(PointSet::Infinity);
        }
    }
    for (_, f) in ram.critical_sets() {
        let (set, inf) = phi.pushforward(&f);
        push_value(&mut universe, &mut frontier, set, inf);
    }
    if ram.infinity_index > 1 {
        let v = phi.eval(&ProjectivePoint::infinity());
        push_value(
            &mut universe,
            &mut frontier,
            linear_of(&v),
            v.is_infinity(),
        );
    }
    let mut pcf = false;
    let mut truncated = false;
    let mut depth = 0;
    loop {
        if frontier.is_empty() {
            pcf = true;
            break;
        }
        let oversized = frontier.iter().any(|s| match s {
            PointSet::Finite(p) => poly_bits(p) > budget.max_coeff_bits,
            PointSet::Infinity => false,
        });
        if depth >= budget.max_depth
            || universe.total_degree() > budget.max_total_degree
            || oversized
        {
            truncated = true;
            break;
        }
        depth += 1;
        let batch = std::mem::take(&mut frontier);
        for set in batch {
            match set {
                PointSet::Finite(p) => {
                    let (img, inf) = phi.pushforward(&p);
                    push_value(&mut universe, &mut frontier, img, inf);
                }
                PointSet::Infinity => {
                    let v = phi.eval(&ProjectivePoint::infinity());
                    push_value(
                        &mut universe,
                        &mut frontier,
                        linear_of(&v),
                        v.is_infinity(),
                    );
                }
            }
        }
    }

    // Partition into nodes: coprime basis, then split by (e, image).
    let mut parts: Vec<UniPoly> = crate::qpoly::coprime_basis(&universe.polys);
    let crit = ram.critical_sets();
    loop {
        let mut changed = false;
        // Split by ramification index.
        let mut next: Vec<UniPoly> = Vec::new();
        for p in &parts {
            let mut rest = p.clone();
            for (_, f) in &crit {
                if rest.is_constant() {
                    break;
                }
                let g = poly_gcd(&rest, f);
                if !g.is_constant() && g != rest {
                    next.push(g.clone());
                    rest = rest.div_exact(&g).monic();
                    changed = true;
                }
            }
            if !rest.is_constant() {
                next.push(rest);
            }
        }
        parts = next;
        // Split by image target.
        let targets: Vec<UniPoly> = parts.clone();
        let mut next: Vec<UniPoly> = Vec::new();
        for p in &parts {
            let mut rest = p.clone();
            let g = poly_gcd(&rest, phi.den());
            if !g.is_constant() && g != rest {
                next.push(g.clone());
                rest = rest.div_exact(&g).monic();
                changed = true;
            }
            for t in &targets {
                if rest.is_constant() {
                    break;
                }
                let pull = compose(t, phi.num(), phi.den()).0;
                let g = poly_gcd(&rest, &pull);
                if !g.is_constant() && g != rest {
                    next.push(g.clone());
                    rest = rest.div_exact(&g).monic();
                    changed = true;
                }
            }
            if !rest.is_constant() {
                next.push(rest);
            }
        }
        parts = next;
        if !changed {
            break;
        }
    }

    let mut sets: Vec<PointSet> = parts.into_iter().map(PointSet::Finite).collect();
    if universe.has_infinity {
        sets.push(PointSet::Infinity);
    }
    sets.sort_by_key(|s| match s {
        PointSet::Finite(p) => (0, p.deg(), format!("{p}")),
        PointSet::Infinity => (1, 0, String::new()),
    });
    let ram_of_set = |s: &PointSet| -> u32 {
        match s {
            PointSet::Finite(p) => {
                for (e, f) in &crit {
                    if !poly_gcd(p, f).is_constant() {
                        return *e;
                    }
                }
                1
            }
            PointSet::Infinity => ram.infinity_index,
        }
    };
    let image_of_set = |s: &PointSet, sets: &[PointSet]| -> Option<usize> {
        match s {
            PointSet::Finite(p) => {
                let (img, inf) = phi.pushforward(p);
                if inf {
                    return sets.iter().position(|t| matches!(t, PointSet::Infinity));
                }
                let img = img.expect("image of a nonempty finite set");
                sets.iter().position(|t| match t {
                    PointSet::Finite(q) => !poly_gcd(&img, q).is_constant(),
                    PointSet::Infinity => false,
                })
            }
            PointSet::Infinity => {
                let v = phi.eval(&ProjectivePoint::infinity());
                sets.iter().position(|t| t.contains(&v))
            }
        }
    };
    let nodes = sets
        .iter()
        .map(|s| PortraitNode {
            set: s.clone(),
            ram_index: ram_of_set(s),
            image: image_of_set(s, &sets),
            weight: None,
        })
        .collect();
    PortraitGraph {
        nodes,
        pcf,
        truncated,
    }
}

// ---------------------------------------------------------------------------
// orbifold weights

#[derive(Debug, Clone)]
enum WeightConstraint {
    /// nu(node) = value (a weight-1 preimage outside the portrait).
    Pin { node: usize, value: u64 },
    /// nu(dst) = e * nu(src).
    Edge { src: usize, e: u32, dst: usize },
}

/// Orbifold signature: the multiset of weights > 1 over post-critical
/// points (one entry per point, so a node of degree 2 contributes
/// twice), None when no consistent integer weight exists or the map is
/// not post-critically finite within budget.
pub fn orbifold_signature(phi: &RationalMap, budget: &PortraitBudget) -> Option<Vec<Weight>> {
    weighted_portrait(phi, budget).map(|graph| {
        let mut sig = Vec::new();
        for node in &graph.nodes {
            match node.weight {
                Some(Weight::Finite(v)) if v > 1 => {
                    for _ in 0..node.set.size() {
                        sig.push(Weight::Finite(v));
                    }
                }
                Some(Weight::Infinite) => {
                    for _ in 0..node.set.size() {
                        sig.push(Weight::Infinite);
                    }
                }
                _ => {}
            }
        }
        sig.sort();
        sig
    })
}

/// Graph with the weights filled in, when a consistent assignment
/// exists.
pub fn weighted_portrait(phi: &RationalMap, budget: &PortraitBudget) -> Option<PortraitGraph> {
    let mut graph = postcritical_graph(phi, budget);
    if !graph.pcf {
        return None;
    }
    let weights = weights_for(phi, &graph)?;
    for (node, w) in graph.nodes.iter_mut().zip(weights) {
        node.weight = Some(w);
    }
    Some(graph)
}

fn weights_for(phi: &RationalMap, graph: &PortraitGraph) -> Option<Vec<Weight>> {
    let n = graph.nodes.len();
    let exceptional = exceptional_points(phi);
    let mut weights: Vec<Option<Weight>> = vec![None; n];
    // Exceptional points carry infinite weight and sit outside the
    // functional equation's domain.
    for p in &exceptional {
        if let Some(i) = graph.node_containing(p) {
            weights[i] = Some(Weight::Infinite);
        }
    }

    let mut constraints: Vec<WeightConstraint> = Vec::new();
    for (zi, node) in graph.nodes.iter().enumerate() {
        let pre = match &node.set {
            PointSet::Finite(p) => compose(p, phi.num(), phi.den()).0,
            PointSet::Infinity => phi.den().clone(),
        };
        if !pre.is_constant() && !pre.is_zero() {
            for (e, layer) in yun_decompose(&pre).factors {
                let mut rest = layer.clone();
                for (wi, wnode) in graph.nodes.iter().enumerate() {
                    let PointSet::Finite(wp) = &wnode.set else {
                        continue;
                    };
                    let g = poly_gcd(&rest, wp);
                    if !g.is_constant() {
                        constraints.push(WeightConstraint::Edge { src: wi, e, dst: zi });
                        rest = rest.div_exact(&g).monic();
                    }
                }
                if !rest.is_constant() {
                    // Preimages outside the post-critical set have weight 1.
                    constraints.push(WeightConstraint::Pin {
                        node: zi,
                        value: u64::from(e),
                    });
                }
            }
        }
        // Infinity as a preimage of this node.
        let inf_image = phi.eval(&ProjectivePoint::infinity());
        if node.set.contains(&inf_image) {
            let e = phi.ram_index_at(&ProjectivePoint::infinity());
            match graph
                .nodes
                .iter()
                .position(|w| matches!(w.set, PointSet::Infinity))
            {
                Some(wi) => constraints.push(WeightConstraint::Edge { src: wi, e, dst: zi }),
                None => constraints.push(WeightConstraint::Pin {
                    node: zi,
                    value: u64::from(e),
                }),
            }
        }
    }

    for c in &constraints {
        if let WeightConstraint::Pin { node, value } = c {
            match weights[*node] {
                Some(Weight::Infinite) => continue,
                Some(Weight::Finite(old)) if old != *value => return None,
                _ => weights[*node] = Some(Weight::Finite(*value)),
            }
        }
    }
    loop {
        let mut progressed = false;
        for c in &constraints {
            let WeightConstraint::Edge { src, e, dst } = c else {
                continue;
            };
            if weights[*src] == Some(Weight::Infinite) || weights[*dst] == Some(Weight::Infinite) {
                // Edges touching exceptional nodes are exempt.
                continue;
            }
            match (weights[*src], weights[*dst]) {
                (Some(Weight::Finite(ws)), None) => {
                    weights[*dst] = Some(Weight::Finite(ws * u64::from(*e)));
                    progressed = true;
                }
                (None, Some(Weight::Finite(wd))) => {
                    if wd % u64::from(*e) != 0 {
                        return None;
                    }
                    weights[*src] = Some(Weight::Finite(wd / u64::from(*e)));
                    progressed = true;
                }
                (Some(Weight::Finite(ws)), Some(Weight::Finite(wd))) => {
                    if ws * u64::from(*e) != wd {
                        return None;
                    }
                }
                _ => {}
            }
        }
        if !progressed {
            break;
        }
    }
    if weights.iter().any(|w| w.is_none()) {
        return None;
    }
    Some(weights.into_iter().map(|w| w.unwrap()).collect())
}

// ---------------------------------------------------------------------------
// preimage structure over {0, infinity}

/// Preimage tree node: a point set in phi^-1(parent) with its
/// ramification index; rational singletons are named, non-divisible
/// named nodes are expanded down to the depth budget.
#[derive(Debug, Clone)]
pub struct TreeNode {
    pub set: PointSet,
    pub ram: u32,
    pub divisible: bool,
    pub named: Option<ProjectivePoint>,
    pub children: Vec<TreeNode>,
}

#[derive(Debug, Clone)]
pub struct PreimageStructure {
    pub zero: Vec<TreeNode>,
    pub infinity: Vec<TreeNode>,
}

fn expand_point(phi: &RationalMap, v: &ProjectivePoint, m: u32, depth: usize) -> Vec<TreeNode> {
    if depth == 0 {
        return Vec::new();
    }
    let fiber = phi.fiber_of(v);
    let mut out = Vec::new();
    let push = |set: PointSet, ram: u32, out: &mut Vec<TreeNode>| {
        let divisible = ram % m == 0;
        let named = set.as_rational_point();
        let children = match (&named, divisible) {
            (Some(p), false) if p != v => expand_point(phi, p, m, depth - 1),
            _ => Vec::new(),
        };
        out.push(TreeNode {
            set,
            ram,
            divisible,
            named,
            children,
        });
    };
    for (e, f) in &fiber.layers {
        push(PointSet::Finite(f.clone()), *e, &mut out);
    }
    if let Some(e) = fiber.at_infinity {
        push(PointSet::Infinity, e, &mut out);
    }
    out
}

/// Annotated preimage layers of 0 and infinity, depth <= 4.
pub fn preimage_structure(phi: &RationalMap, m: u32, depth: usize) -> PreimageStructure {
    assert!((1..=4).contains(&depth), "preimage depth must be 1..=4");
    PreimageStructure {
        zero: expand_point(phi, &ProjectivePoint::from_int(0), m, depth),
        infinity: expand_point(phi, &ProjectivePoint::infinity(), m, depth),
    }
}

// ---------------------------------------------------------------------------
// mu-type classification

/// Catalog tags; (2,1) serves both the m = 3 and m = 2 rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuTag {
    T13,
    T14,
    T4,
    T21,
    T9,
    T5a,
    T5b,
    T31,
    T3,
    T22,
    T12,
    T11a,
    T11b,
    T11c,
    T10a,
    T10b,
    T8,
    T77,
    T76,
}

impl std::fmt::Display for MuTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MuTag::T13 => "(13)",
            MuTag::T14 => "(14)",
            MuTag::T4 => "(4)",
            MuTag::T21 => "(2,1)",
            MuTag::T9 => "(9)",
            MuTag::T5a => "(5a)",
            MuTag::T5b => "(5b)",
            MuTag::T31 => "(3,1)",
            MuTag::T3 => "(3)",
            MuTag::T22 => "(2,2)",
            MuTag::T12 => "(12)",
            MuTag::T11a => "(11a)",
            MuTag::T11b => "(11b)",
            MuTag::T11c => "(11c)",
            MuTag::T10a => "(10a)",
            MuTag::T10b => "(10b)",
            MuTag::T8 => "(8)",
            MuTag::T77 => "(7,7)",
            MuTag::T76 => "(7,6)",
        };
        write!(f, "{}", s)
    }
}

/// What the structure of 0 and infinity looked like, for unclassified
/// reports.
#[derive(Debug, Clone)]
pub struct StructureReport {
    pub nd_zero: (Vec<(u32, UniPoly)>, Option<u32>),
    pub nd_infinity: (Vec<(u32, UniPoly)>, Option<u32>),
    pub image_zero: ProjectivePoint,
    pub image_infinity: ProjectivePoint,
}

/// Verified m = 2 normal form from the bounded-genus catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case5Kind {
    A,
    B,
    C,
    D,
}

impl std::fmt::Display for Case5Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Case5Kind::A => write!(f, "5a"),
            Case5Kind::B => write!(f, "5b"),
            Case5Kind::C => write!(f, "5c"),
            Case5Kind::D => write!(f, "5d"),
        }
    }
}

/// One of the four m = 2 shapes, with its polynomial identity verified
/// exactly:
///   5a: phi = -f^2/((x-C)g^2),    f^2 + C(x-C)g^2 = C x h^2
///   5b: phi = -(x-C)f^2/g^2,      (x-C)f^2 + C g^2 = x h^2
///   5c: phi = B(x-C)f^2/g^2,      B(x-C)f^2 - C g^2 = -C h^2
///   5d: phi = B x(x-C)f^2/g^2,    B x(x-C)f^2 - C g^2 = -C h^2
#[derive(Debug, Clone)]
pub struct Case5Form {
    pub kind: Case5Kind,
    pub b: BigRational,
    pub c: BigRational,
    pub f: UniPoly,
    pub g: UniPoly,
    pub h: UniPoly,
    /// Matched on 1/phi(1/x) rather than phi.
    pub swapped: bool,
}

#[derive(Debug, Clone)]
pub enum MuType {
    Trivial(TrivialDecomposition),
    Tagged {
        tag: MuTag,
        m: u32,
        /// Matched after conjugating by x -> 1/x.
        swapped: bool,
        /// Named points in the coordinates of the input map.
        named: Vec<(&'static str, PointSet)>,
        /// Verified normal form for the m = 2 quasi-Lattes tags.
        case5: Option<Case5Form>,
    },
    Unclassified(Box<StructureReport>),
}

impl MuType {
    pub fn tag(&self) -> Option<MuTag> {
        match self {
            MuType::Tagged { tag, .. } => Some(*tag),
            _ => None,
        }
    }
}

struct Nd {
    finite: Vec<(u32, UniPoly)>,
    infinity: Option<u32>,
}

impl Nd {
    fn is_empty(&self) -> bool {
        self.finite.is_empty() && self.infinity.is_none()
    }

    /// The unique finite layer, when the non-divisible part is exactly
    /// one layer and does not include infinity.
    fn single_finite(&self) -> Option<(u32, &UniPoly)> {
        if self.infinity.is_none() && self.finite.len() == 1 {
            Some((self.finite[0].0, &self.finite[0].1))
        } else {
            None
        }
    }
}

fn nd_of<S: PreimageSource + ?Sized>(src: &S, v: &ProjectivePoint, m: u32) -> Nd {
    let (finite, infinity) = src.fiber_of(v).nondivisible(m);
    Nd { finite, infinity }
}

fn point_of_linear(p: &UniPoly) -> Option<ProjectivePoint> {
    (p.deg() == 1).then(|| {
        let r = -p.coeff(0) / p.coeff(1);
        ProjectivePoint::from_rational(&r)
    })
}

/// A successful structural match.
#[derive(Debug, Clone)]
pub struct TagMatch {
    pub tag: MuTag,
    pub named: Vec<(&'static str, PointSet)>,
}

fn inf() -> ProjectivePoint {
    ProjectivePoint::infinity()
}

fn zero_pt() -> ProjectivePoint {
    ProjectivePoint::from_int(0)
}

fn all_divisible<S: PreimageSource + ?Sized>(src: &S, v: &ProjectivePoint, m: u32) -> bool {
    nd_of(src, v, m).is_empty()
}

/// Match the non-trivial mu-type catalog rows against the preimage
/// structures of 0 and infinity, in the orientation the catalog fixes;
/// the caller tries the x -> 1/x conjugate for the other orientation.
pub fn match_mu_tag<S: PreimageSource + ?Sized>(src: &S, m: u32) -> Option<TagMatch> {
    let d = src.map_degree();
    let z = zero_pt();
    let nd0 = nd_of(src, &z, m);
    let ndi = nd_of(src, &inf(), m);

    match m {
        4 => {
            // (13): inf fixed (e 1) with 0 -> inf (e 1); beta -> 0 with
            // e = 2 and an all-even fiber; d = 2 mod 4.
            if d % 4 == 2
                && ndi.infinity == Some(1)
                && ndi.finite.len() == 1
                && ndi.finite[0] == (1, UniPoly::x())
            {
                if let Some((2, layer)) = nd0.single_finite() {
                    if let Some(beta) = point_of_linear(layer) {
                        if all_divisible(src, &beta, 2) {
                            return Some(TagMatch {
                                tag: MuTag::T13,
                                named: vec![("beta", PointSet::of_point(&beta))],
                            });
                        }
                    }
                }
            }
            // (14): inf fixed (e 1); fiber of inf holds 0 (e 1) and beta
            // (e 2); fiber of 0 all divisible; 4 | d.
            if d % 4 == 0 && ndi.infinity == Some(1) && nd0.is_empty() && !ndi.finite.is_empty() {
                let mut beta = None;
                let mut zero_seen = false;
                for (e, f) in &ndi.finite {
                    match (e, f.deg()) {
                        (1, 1) if *f == UniPoly::x() => zero_seen = true,
                        (2, 1) => beta = point_of_linear(f),
                        _ => return None,
                    }
                }
                if zero_seen {
                    if let Some(beta) = beta {
                        if all_divisible(src, &beta, 2) {
                            return Some(TagMatch {
                                tag: MuTag::T14,
                                named: vec![("beta", PointSet::of_point(&beta))],
                            });
                        }
                    }
                }
            }
            None
        }
        3 => {
            // (4): 3-cycle 0 -> inf -> gamma -> 0, cycle indices 1,
            // everything else divisible by 3.
            if let Some((1, layer)) = ndi.single_finite() {
                if *layer == UniPoly::x() {
                    let gamma = src.image_of(&inf());
                    if !gamma.is_infinity() && !gamma.is_zero() {
                        let ndg = nd_of(src, &gamma, m);
                        if ndg.infinity == Some(1) && ndg.finite.is_empty() {
                            if let Some((1, l0)) = nd0.single_finite() {
                                if point_of_linear(l0).as_ref() == Some(&gamma) {
                                    return Some(TagMatch {
                                        tag: MuTag::T4,
                                        named: vec![("gamma", PointSet::of_point(&gamma))],
                                    });
                                }
                            }
                        }
                    }
                }
            }
            // (2,1): inf simple fixed; 0 <-> beta two-cycle, cycle
            // indices 1.
            if ndi.infinity == Some(1) && ndi.finite.is_empty() {
                if let Some((1, layer)) = nd0.single_finite() {
                    if let Some(beta) = point_of_linear(layer) {
                        if !beta.is_zero() && !beta.is_infinity() {
                            let ndb = nd_of(src, &beta, m);
                            if let Some((1, lb)) = ndb.single_finite() {
                                if *lb == UniPoly::x() {
                                    return Some(TagMatch {
                                        tag: MuTag::T21,
                                        named: vec![("beta", PointSet::of_point(&beta))],
                                    });
                                }
                            }
                        }
                    }
                }
            }
            // (9): inf fixed e 1 with 0 and beta in its fiber at e 1;
            // fibers of 0 and beta fully divisible.
            if ndi.infinity == Some(1) && nd0.is_empty() && ndi.finite.len() == 1 {
                let (e, layer) = &ndi.finite[0];
                if *e == 1 && layer.deg() == 2 && layer.eval(&BigRational::zero()).is_zero() {
                    let other = layer.div_exact(&UniPoly::x()).monic();
                    if let Some(beta) = point_of_linear(&other) {
                        if all_divisible(src, &beta, m) {
                            return Some(TagMatch {
                                tag: MuTag::T9,
                                named: vec![("beta", PointSet::of_point(&beta))],
                            });
                        }
                    }
                }
            }
            None
        }
        2 => match_mu_tag_m2(src, &nd0, &ndi),
        _ => None,
    }
}

fn match_mu_tag_m2<S: PreimageSource + ?Sized>(src: &S, nd0: &Nd, ndi: &Nd) -> Option<TagMatch> {
    let m = 2;
    let d = src.map_degree();
    let z = zero_pt();
    let named_pt = |layer: &UniPoly| -> Option<ProjectivePoint> {
        point_of_linear(layer).filter(|p| !p.is_zero() && !p.is_infinity())
    };

    if d % 2 == 1 {
        // (5a): four-cycle inf -> delta -> gamma -> 0 -> inf.
        if let (Some((1, l_i)), Some((1, l_0))) = (ndi.single_finite(), nd0.single_finite()) {
            if *l_i == UniPoly::x() {
                if let Some(gamma) = named_pt(l_0) {
                    let ndg = nd_of(src, &gamma, m);
                    if let Some((1, l_g)) = ndg.single_finite() {
                        if let Some(delta) = named_pt(l_g) {
                            if delta != gamma {
                                let ndd = nd_of(src, &delta, m);
                                if ndd.finite.is_empty()
                                    && ndd.infinity == Some(1)
                                    && src.image_of(&inf()) == delta
                                {
                                    return Some(TagMatch {
                                        tag: MuTag::T5a,
                                        named: vec![
                                            ("gamma", PointSet::of_point(&gamma)),
                                            ("delta", PointSet::of_point(&delta)),
                                        ],
                                    });
                                }
                            }
                        }
                    }
                }
            } else if let (Some(gamma), Some(delta)) = (named_pt(l_i), named_pt(l_0)) {
                // (5b): four-cycle inf -> delta -> 0 -> gamma -> inf.
                if gamma != delta {
                    let ndg = nd_of(src, &gamma, m);
                    let ndd = nd_of(src, &delta, m);
                    if ndg.infinity.is_none()
                        && ndg.finite.len() == 1
                        && ndg.finite[0] == (1, UniPoly::x())
                        && ndd.finite.is_empty()
                        && ndd.infinity == Some(1)
                        && src.image_of(&inf()) == delta
                    {
                        return Some(TagMatch {
                            tag: MuTag::T5b,
                            named: vec![
                                ("gamma", PointSet::of_point(&gamma)),
                                ("delta", PointSet::of_point(&delta)),
                            ],
                        });
                    }
                }
            }
        }
        // (3): 3-cycle C -> inf -> 0 -> C with odd indices on the cycle.
        if nd0.finite.is_empty() && nd0.infinity.is_some_and(|e| e % 2 == 1) {
            if let Some((ei, l_i)) = ndi.single_finite() {
                if ei % 2 == 1 {
                    if let Some(c) = named_pt(l_i) {
                        let ndc = nd_of(src, &c, m);
                        if ndc.infinity.is_none() {
                            if let Some((ec, lc)) = ndc.single_finite() {
                                if ec % 2 == 1 && *lc == UniPoly::x() {
                                    return Some(TagMatch {
                                        tag: MuTag::T3,
                                        named: vec![("C", PointSet::of_point(&c))],
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        // (3,1): inf fixed simple; 3-cycle 0 -> gamma -> beta -> 0.
        if ndi.infinity.is_some_and(|e| e % 2 == 1) && ndi.finite.is_empty() {
            if let Some((e0, l0)) = nd0.single_finite() {
                if e0 % 2 == 1 {
                    if let Some(beta) = named_pt(l0) {
                        let ndb = nd_of(src, &beta, m);
                        if ndb.infinity.is_none() {
                            if let Some((eb, lb)) = ndb.single_finite() {
                                if eb % 2 == 1 {
                                    if let Some(gamma) = named_pt(lb) {
                                        if gamma != beta {
                                            let ndg = nd_of(src, &gamma, m);
                                            if ndg.infinity.is_none() {
                                                if let Some((eg, lg)) = ndg.single_finite() {
                                                    if eg % 2 == 1 && *lg == UniPoly::x() {
                                                        return Some(TagMatch {
                                                            tag: MuTag::T31,
                                                            named: vec![
                                                                (
                                                                    "beta",
                                                                    PointSet::of_point(&beta),
                                                                ),
                                                                (
                                                                    "gamma",
                                                                    PointSet::of_point(&gamma),
                                                                ),
                                                            ],
                                                        });
                                                    }
                                                }
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        // (2,2): disjoint 2-cycles inf <-> beta1 and 0 <-> beta2.
        if let (Some((ei, li)), Some((e0, l0))) = (ndi.single_finite(), nd0.single_finite()) {
            if ei % 2 == 1 && e0 % 2 == 1 {
                if let (Some(b1), Some(b2)) = (named_pt(li), named_pt(l0)) {
                    if b1 != b2 {
                        let nd1 = nd_of(src, &b1, m);
                        let nd2 = nd_of(src, &b2, m);
                        let cyc1 =
                            nd1.finite.is_empty() && nd1.infinity.is_some_and(|e| e % 2 == 1);
                        let cyc2 = nd2.infinity.is_none()
                            && nd2
                                .single_finite()
                                .is_some_and(|(e, l)| e % 2 == 1 && *l == UniPoly::x());
                        if cyc1 && cyc2 {
                            return Some(TagMatch {
                                tag: MuTag::T22,
                                named: vec![
                                    ("beta1", PointSet::of_point(&b1)),
                                    ("beta2", PointSet::of_point(&b2)),
                                ],
                            });
                        }
                    }
                }
            }
        }
        // (2,1): inf fixed (odd index); 0 <-> C 2-cycle (odd indices).
        if ndi.infinity.is_some_and(|e| e % 2 == 1) && ndi.finite.is_empty() {
            if let Some((e0, l0)) = nd0.single_finite() {
                if e0 % 2 == 1 {
                    if let Some(c) = named_pt(l0) {
                        let ndc = nd_of(src, &c, m);
                        if ndc.infinity.is_none()
                            && ndc
                                .single_finite()
                                .is_some_and(|(e, l)| e % 2 == 1 && *l == UniPoly::x())
                        {
                            return Some(TagMatch {
                                tag: MuTag::T21,
                                named: vec![("C", PointSet::of_point(&c))],
                            });
                        }
                    }
                }
            }
        }
        return None;
    }

    // Even degree.
    // (12): inf fixed e 1; odd fiber of inf = {0} plus a 2-point set,
    // all e 1; fiber of 0 divisible; betas' fibers even.
    if ndi.infinity == Some(1) && nd0.is_empty() {
        if let Some((1, layer)) = ndi.single_finite() {
            if layer.deg() == 3 && layer.eval(&BigRational::zero()).is_zero() {
                let betas = layer.div_exact(&UniPoly::x()).monic();
                if src.set_fibers_divisible(&betas, 2) {
                    return Some(TagMatch {
                        tag: MuTag::T12,
                        named: vec![("betas", PointSet::Finite(betas))],
                    });
                }
            }
        }
    }
    // (11a): 2-cycle 0 <-> inf; odd(inf) = {0, beta}, odd(0) = {inf, gamma}.
    if ndi.infinity.is_none() && nd0.infinity == Some(1) && nd0.finite.len() == 1 {
        if let Some((1, li)) = ndi.single_finite() {
            if li.deg() == 2 && li.eval(&BigRational::zero()).is_zero() {
                let (e0, l0) = (nd0.finite[0].0, &nd0.finite[0].1);
                if e0 == 1 && l0.deg() == 1 {
                    let beta_l = li.div_exact(&UniPoly::x()).monic();
                    if let (Some(beta), Some(gamma)) = (named_pt(&beta_l), named_pt(l0)) {
                        if beta != gamma
                            && all_divisible(src, &beta, 2)
                            && all_divisible(src, &gamma, 2)
                        {
                            return Some(TagMatch {
                                tag: MuTag::T11a,
                                named: vec![
                                    ("beta", PointSet::of_point(&beta)),
                                    ("gamma", PointSet::of_point(&gamma)),
                                ],
                            });
                        }
                    }
                }
            }
        }
    }
    // (11b): 2-cycle inf <-> beta; odd(inf) = {0, beta}; odd(beta) =
    // {inf, gamma}.
    if ndi.infinity.is_none() && nd0.is_empty() {
        if let Some((1, li)) = ndi.single_finite() {
            if li.deg() == 2 && li.eval(&BigRational::zero()).is_zero() {
                if let Some(beta) = named_pt(&li.div_exact(&UniPoly::x()).monic()) {
                    let ndb = nd_of(src, &beta, 2);
                    if ndb.infinity == Some(1) && ndb.finite.len() == 1 {
                        let (eb, lb) = (ndb.finite[0].0, &ndb.finite[0].1);
                        if eb == 1 && lb.deg() == 1 {
                            if let Some(gamma) = named_pt(lb) {
                                if gamma != beta && all_divisible(src, &gamma, 2) {
                                    return Some(TagMatch {
                                        tag: MuTag::T11b,
                                        named: vec![
                                            ("beta", PointSet::of_point(&beta)),
                                            ("gamma", PointSet::of_point(&gamma)),
                                        ],
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    // (11c): 2-cycle inf <-> beta; odd(inf) = {beta, gamma}; odd(beta) =
    // {0, inf}.
    if ndi.infinity.is_none() && nd0.is_empty() {
        if let Some((1, li)) = ndi.single_finite() {
            if li.deg() == 2 {
                if let Some(roots) = low_degree_rational_roots(li) {
                    if roots.len() == 2 {
                        let pts = [
                            ProjectivePoint::from_rational(&roots[0]),
                            ProjectivePoint::from_rational(&roots[1]),
                        ];
                        for (beta, gamma) in
                            [(pts[0].clone(), pts[1].clone()), (pts[1].clone(), pts[0].clone())]
                        {
                            if beta.is_zero() || gamma.is_zero() {
                                continue;
                            }
                            let ndb = nd_of(src, &beta, 2);
                            if ndb.infinity == Some(1)
                                && ndb.finite.len() == 1
                                && ndb.finite[0] == (1, UniPoly::x())
                                && all_divisible(src, &gamma, 2)
                                && src.image_of(&beta).is_infinity()
                            {
                                return Some(TagMatch {
                                    tag: MuTag::T11c,
                                    named: vec![
                                        ("beta", PointSet::of_point(&beta)),
                                        ("gamma", PointSet::of_point(&gamma)),
                                    ],
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    // (10a): inf fixed e 1; odd(inf) = {0, inf}; odd(0) = a 2-point set.
    if ndi.infinity == Some(1) {
        if let Some((1, li)) = ndi.single_finite() {
            if *li == UniPoly::x() {
                if let Some((1, l0)) = nd0.single_finite() {
                    if l0.deg() == 2
                        && !l0.eval(&BigRational::zero()).is_zero()
                        && src.set_fibers_divisible(l0, 2)
                    {
                        return Some(TagMatch {
                            tag: MuTag::T10a,
                            named: vec![("gammas", PointSet::Finite(l0.clone()))],
                        });
                    }
                }
            }
        }
    }
    // (10b): inf fixed e 1; odd(inf) = {inf, beta}; odd(beta) = {0, gamma}.
    if ndi.infinity == Some(1) && nd0.is_empty() {
        if let Some((1, li)) = ndi.single_finite() {
            if li.deg() == 1 {
                if let Some(beta) = named_pt(li) {
                    let ndb = nd_of(src, &beta, 2);
                    if ndb.infinity.is_none() {
                        if let Some((1, lb)) = ndb.single_finite() {
                            if lb.deg() == 2 && lb.eval(&BigRational::zero()).is_zero() {
                                if let Some(gamma) =
                                    named_pt(&lb.div_exact(&UniPoly::x()).monic())
                                {
                                    if all_divisible(src, &gamma, 2) {
                                        return Some(TagMatch {
                                            tag: MuTag::T10b,
                                            named: vec![
                                                ("beta", PointSet::of_point(&beta)),
                                                ("gamma", PointSet::of_point(&gamma)),
                                            ],
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    // (8): odd(0) = {inf, C}; fibers of inf and C fully even.
    if nd0.infinity.is_some_and(|e| e % 2 == 1) && ndi.is_empty() && nd0.finite.len() == 1 {
        let (ec, lc) = (nd0.finite[0].0, &nd0.finite[0].1);
        if ec % 2 == 1 && lc.deg() == 1 {
            if let Some(c) = named_pt(lc) {
                if all_divisible(src, &c, 2) {
                    return Some(TagMatch {
                        tag: MuTag::T8,
                        named: vec![("C", PointSet::of_point(&c))],
                    });
                }
            }
        }
    }
    // (7,7): inf fixed (odd) plus odd partner beta1; 0 fixed (odd) plus
    // odd partner beta2; the partners' fibers are even.
    if ndi.infinity.is_some_and(|e| e % 2 == 1) && nd0.infinity.is_none() {
        let zero_fixed = nd0
            .finite
            .iter()
            .any(|(e, l)| e % 2 == 1 && l.eval(&BigRational::zero()).is_zero());
        if zero_fixed {
            let b1 = match ndi.single_finite() {
                Some((e, l)) if e % 2 == 1 && l.deg() == 1 => named_pt(l),
                _ => None,
            };
            let b2 = odd_partner_of_zero(nd0);
            if let (Some(b1), Some(b2)) = (b1, b2) {
                if b1 != b2 && all_divisible(src, &b1, 2) && all_divisible(src, &b2, 2) {
                    return Some(TagMatch {
                        tag: MuTag::T77,
                        named: vec![
                            ("beta1", PointSet::of_point(&b1)),
                            ("beta2", PointSet::of_point(&b2)),
                        ],
                    });
                }
            }
        }
    }
    // (7,6): 0 fixed (odd index) with odd partner C; fiber of inf fully
    // even.
    if ndi.is_empty() && nd0.infinity.is_none() {
        let zero_fixed = nd0
            .finite
            .iter()
            .any(|(e, l)| e % 2 == 1 && l.eval(&BigRational::zero()).is_zero());
        if zero_fixed && src.image_of(&z) == z {
            if let Some(c) = odd_partner_of_zero(nd0) {
                if all_divisible(src, &c, 2) {
                    return Some(TagMatch {
                        tag: MuTag::T76,
                        named: vec![("C", PointSet::of_point(&c))],
                    });
                }
            }
        }
    }
    None
}

/// In the odd part of a fiber containing 0, the unique other rational
/// point.
fn odd_partner_of_zero(nd: &Nd) -> Option<ProjectivePoint> {
    let mut partner = None;
    for (e, l) in &nd.finite {
        if e % 2 == 0 {
            continue;
        }
        let mut rest = l.clone();
        if rest.eval(&BigRational::zero()).is_zero() {
            rest = rest.div_exact(&UniPoly::x()).monic();
        }
        match rest.degree() {
            None | Some(0) => {}
            Some(1) => {
                if partner.is_some() {
                    return None;
                }
                partner = point_of_linear(&rest);
            }
            _ => return None,
        }
    }
    partner.filter(|p| !p.is_zero() && !p.is_infinity())
}

// ---------------------------------------------------------------------------
// classification driver

fn structure_report(phi: &RationalMap, m: u32) -> Box<StructureReport> {
    let z = zero_pt();
    let nd0 = nd_of(phi, &z, m);
    let ndi = nd_of(phi, &inf(), m);
    Box::new(StructureReport {
        nd_zero: (nd0.finite, nd0.infinity),
        nd_infinity: (ndi.finite, ndi.infinity),
        image_zero: phi.eval(&z),
        image_infinity: phi.eval(&inf()),
    })
}

/// Transform named points back through x -> 1/x.
fn unswap_named(named: Vec<(&'static str, PointSet)>) -> Vec<(&'static str, PointSet)> {
    named
        .into_iter()
        .map(|(name, set)| {
            let new = match &set {
                PointSet::Infinity => PointSet::Finite(UniPoly::x()),
                PointSet::Finite(p) if p.deg() == 1 && p.coeff(0).is_zero() => PointSet::Infinity,
                PointSet::Finite(p) => {
                    let mut c: Vec<BigRational> = p.coeffs().to_vec();
                    c.reverse();
                    PointSet::Finite(UniPoly::from_coeffs(c).monic())
                }
            };
            (name, new)
        })
        .collect()
}

/// Classify phi against the mu-type catalog for modulus m: trivial
/// form first, then the catalog rows on phi and on its x -> 1/x
/// conjugate, with the verified m = 2 normal form attached where the
/// catalog promises one.
pub fn classify_mu_type(phi: &RationalMap, m: u32) -> MuType {
    assert!(m >= 2 && phi.degree() >= 2);
    if let Some(t) = is_trivial(phi, m) {
        return MuType::Trivial(t);
    }
    if m >= 5 {
        // Non-trivial maps with two m-branch abundant points do not
        // exist for m >= 5; report the structure.
        return MuType::Unclassified(structure_report(phi, m));
    }
    if let Some(hit) = match_mu_tag(phi, m) {
        let case5 = attach_case5(phi, m, hit.tag);
        return MuType::Tagged {
            tag: hit.tag,
            m,
            swapped: false,
            named: hit.named,
            case5,
        };
    }
    let conj = phi.conjugate_by_inversion();
    if let Some(hit) = match_mu_tag(&conj, m) {
        let case5 = attach_case5(phi, m, hit.tag);
        return MuType::Tagged {
            tag: hit.tag,
            m,
            swapped: true,
            named: unswap_named(hit.named),
            case5,
        };
    }
    MuType::Unclassified(structure_report(phi, m))
}

fn attach_case5(phi: &RationalMap, m: u32, tag: MuTag) -> Option<Case5Form> {
    if m != 2 {
        return None;
    }
    let kind = match tag {
        MuTag::T3 => Case5Kind::A,
        MuTag::T21 => Case5Kind::B,
        MuTag::T8 => Case5Kind::C,
        MuTag::T76 => Case5Kind::D,
        _ => return None,
    };
    verify_case5_kind(phi, kind)
}

// ---------------------------------------------------------------------------
// m = 2 normal forms (cases 5a-5d)

fn poly_square_root(p: &UniPoly) -> Option<UniPoly> {
    if p.is_zero() {
        return None;
    }
    mth_root_function(p, &UniPoly::one(), 2).map(|(n, d)| {
        debug_assert!(d.is_one());
        n
    })
}

/// p = content * odd * square^2 with odd, square monic and odd
/// squarefree.
fn odd_square_split(p: &UniPoly) -> (BigRational, UniPoly, UniPoly) {
    let d = yun_decompose(p);
    let mut odd = UniPoly::one();
    let mut square = UniPoly::one();
    for (e, f) in &d.factors {
        if e % 2 == 1 {
            odd = odd.mul(f);
        }
        square = square.mul(&f.pow(e / 2));
    }
    (d.content, odd, square)
}

fn extract_case5(phi: &RationalMap, kind: Case5Kind) -> Option<Case5Form> {
    let (cn, num_odd, num_sq) = odd_square_split(phi.num());
    let (cd, den_odd, den_sq) = odd_square_split(phi.den());
    let x = UniPoly::x();
    let ratio = &cn / &cd;
    match kind {
        Case5Kind::A => {
            // phi = -f^2/((x-C)g^2): numerator odd part trivial, the
            // denominator's odd part is the single linear factor x - C,
            // and -cn/cd must be a rational square.
            if !num_odd.is_one() || den_odd.deg() != 1 {
                return None;
            }
            let c = -den_odd.coeff(0);
            if c.is_zero() {
                return None;
            }
            let sigma = crate::arith::mth_root_rational(&-&ratio, 2)?;
            let f = num_sq.scale(&sigma);
            let g = den_sq.clone();
            if g.deg() < f.deg() {
                return None;
            }
            // f^2 + C(x - C)g^2 = C x h^2
            let lhs = f.mul(&f).add(&den_odd.mul(&g.mul(&g)).scale(&c));
            let (q, r) = lhs.divrem(&x.scale(&c));
            if !r.is_zero() {
                return None;
            }
            let h = poly_square_root(&q)?;
            Some(Case5Form {
                kind,
                b: -BigRational::one(),
                c,
                f,
                g,
                h,
                swapped: false,
            })
        }
        Case5Kind::B => {
            // phi = -(x-C)f^2/g^2.
            if !den_odd.is_one() || num_odd.deg() != 1 {
                return None;
            }
            let c = -num_odd.coeff(0);
            if c.is_zero() {
                return None;
            }
            let sigma = crate::arith::mth_root_rational(&-&ratio, 2)?;
            let f = num_sq.scale(&sigma);
            let g = den_sq.clone();
            // (x-C)f^2 + C g^2 = x h^2
            let lhs = num_odd.mul(&f.mul(&f)).add(&g.mul(&g).scale(&c));
            let (q, r) = lhs.divrem(&x);
            if !r.is_zero() {
                return None;
            }
            let h = poly_square_root(&q)?;
            Some(Case5Form {
                kind,
                b: -BigRational::one(),
                c,
                f,
                g,
                h,
                swapped: false,
            })
        }
        Case5Kind::C => {
            // phi = B(x-C)f^2/g^2 with deg g > deg f.
            if !den_odd.is_one() || num_odd.deg() != 1 {
                return None;
            }
            let c = -num_odd.coeff(0);
            if c.is_zero() {
                return None;
            }
            let b = ratio;
            let f = num_sq.clone();
            let g = den_sq.clone();
            if g.deg() <= f.deg() {
                return None;
            }
            // B(x-C)f^2 - C g^2 = -C h^2
            let lhs = num_odd
                .mul(&f.mul(&f))
                .scale(&b)
                .sub(&g.mul(&g).scale(&c));
            let target = lhs.scale(&(-&c).recip());
            let h = poly_square_root(&target)?;
            Some(Case5Form {
                kind,
                b,
                c,
                f,
                g,
                h,
                swapped: false,
            })
        }
        Case5Kind::D => {
            // phi = B x(x-C)f^2/g^2.
            if !den_odd.is_one()
                || num_odd.deg() != 2
                || !num_odd.eval(&BigRational::zero()).is_zero()
            {
                return None;
            }
            let lin = num_odd.div_exact(&x);
            let c = -lin.coeff(0);
            if c.is_zero() {
                return None;
            }
            let b = ratio;
            let f = num_sq.clone();
            let g = den_sq.clone();
            // B x(x-C)f^2 - C g^2 = -C h^2
            let lhs = num_odd
                .mul(&f.mul(&f))
                .scale(&b)
                .sub(&g.mul(&g).scale(&c));
            let target = lhs.scale(&(-&c).recip());
            let h = poly_square_root(&target)?;
            Some(Case5Form {
                kind,
                b,
                c,
                f,
                g,
                h,
                swapped: false,
            })
        }
    }
}

/// Extract and verify the stated case on phi or on 1/phi(1/x).
pub fn verify_case5_kind(phi: &RationalMap, kind: Case5Kind) -> Option<Case5Form> {
    if let Some(c5) = extract_case5(phi, kind) {
        return Some(c5);
    }
    extract_case5(&phi.conjugate_by_inversion(), kind).map(|mut c5| {
        c5.swapped = true;
        c5
    })
}

/// First of the four m = 2 normal forms that matches phi or its
/// x -> 1/x conjugate, each verified exactly.
pub fn verify_case5_form(phi: &RationalMap) -> Option<Case5Form> {
    [Case5Kind::A, Case5Kind::B, Case5Kind::C, Case5Kind::D]
        .into_iter()
        .find_map(|k| verify_case5_kind(phi, k))
}

// ---------------------------------------------------------------------------
// polynomial classification

#[derive(Debug, Clone)]
pub enum PolynomialClass {
    /// c x^j g(x)^m.
    Case1(TrivialDecomposition),
    /// Conjugate by x -> cx of (-1)^d T_d(x+2) - 2 (m = 2 only).
    Chebyshev { c: BigRational, d: u32 },
    Neither,
}

/// Monic Chebyshev polynomial T_d, defined by T_d(z + 1/z) = z^d + z^-d.
pub fn chebyshev(d: u32) -> UniPoly {
    assert!(d >= 1);
    let mut prev = UniPoly::constant(BigRational::from(BigInt::from(2))); // T_0
    let mut cur = UniPoly::x(); // T_1
    for _ in 1..d {
        let next = UniPoly::x().mul(&cur).sub(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// (-1)^d (T_d(x + 2)) - 2: the polynomials with 0 in the post-critical
/// set that escape the trivial form.
pub fn chebyshev_exception(d: u32) -> UniPoly {
    assert!(d >= 2);
    let td = chebyshev(d);
    let (shifted, _) = compose(&td, &UniPoly::from_ints(&[2, 1]), &UniPoly::one());
    let signed = if d % 2 == 1 { shifted.neg() } else { shifted };
    signed.sub(&UniPoly::constant(BigRational::from(BigInt::from(2))))
}

/// Classify a polynomial map: trivial form, scaled Chebyshev exception
/// (m = 2 only), or neither. The scaling is solved from the second
/// derivative at 0 via T_d''(2) = (d^4 - d^2)/6 and the conjugacy
/// identity is then verified exactly.
pub fn classify_polynomial(phi: &RationalMap, m: u32) -> PolynomialClass {
    assert!(phi.is_polynomial() && phi.degree() >= 2);
    if let Some(t) = is_trivial(phi, m) {
        return PolynomialClass::Case1(t);
    }
    if m != 2 {
        return PolynomialClass::Neither;
    }
    let d = phi.degree() as u32;
    let p = phi.num().scale(&phi.den().coeff(0).recip());
    let second = p.coeff(2) * BigRational::from(BigInt::from(2)); // phi''(0)
    let td2 = BigRational::new(
        BigInt::from(u64::from(d).pow(4) - u64::from(d).pow(2)),
        BigInt::from(6),
    );
    let sign = if d % 2 == 1 {
        -BigRational::one()
    } else {
        BigRational::one()
    };
    let c = sign * second / td2;
    if c.is_zero() {
        return PolynomialClass::Neither;
    }
    // Verify c * phi(x/c) == (-1)^d T_d(x+2) - 2.
    let inner = UniPoly::from_coeffs(vec![BigRational::zero(), c.recip()]);
    let (composed, _) = compose(&p, &inner, &UniPoly::one());
    if composed.scale(&c) == chebyshev_exception(d) {
        PolynomialClass::Chebyshev { c, d }
    } else {
        PolynomialClass::Neither
    }
}

// ---------------------------------------------------------------------------
// branch-abundance certification

/// Why a candidate pair was certified m-branch abundant.
#[derive(Debug, Clone)]
pub enum AbundanceEvidence {
    /// The conjugated map is trivial with respect to {0, infinity}.
    Trivial(TrivialDecomposition),
    /// A verified iterate relation for the conjugated map.
    Relation(IterateRelation),
}

#[derive(Debug, Clone)]
pub struct AbundanceCertificate {
    pub pair: (ProjectivePoint, ProjectivePoint),
    pub evidence: AbundanceEvidence,
    /// Structural tag of the conjugated map, when the catalog matched.
    pub mu_type: Option<MuTag>,
}

#[derive(Debug, Clone)]
pub struct BranchAbundanceReport {
    pub abundant: Vec<ProjectivePoint>,
    pub certificates: Vec<AbundanceCertificate>,
}

/// Moebius map sending u to 0 and v to infinity.
fn moebius_to_zero_inf(u: &ProjectivePoint, v: &ProjectivePoint) -> RationalMap {
    let (ua, ub) = match u.to_rational() {
        Some(q) => (q.numer().clone(), q.denom().clone()),
        None => (BigInt::one(), BigInt::zero()),
    };
    let (va, vb) = match v.to_rational() {
        Some(q) => (q.numer().clone(), q.denom().clone()),
        None => (BigInt::one(), BigInt::zero()),
    };
    RationalMap::new(
        &UniPoly::from_coeffs(vec![BigRational::from(-ua), BigRational::from(ub)]),
        &UniPoly::from_coeffs(vec![BigRational::from(-va), BigRational::from(vb)]),
    )
    .expect("distinct points give a Moebius map")
}

/// Decide m-branch abundance for each candidate by conjugating pairs to
/// {0, infinity} and certifying with the trivial form or a verified
/// iterate relation; either is exact by the bounded-genus theory. The
/// at-most-four bound is asserted.
pub fn count_branch_abundant(
    phi: &RationalMap,
    m: u32,
    candidates: &[ProjectivePoint],
) -> Result<BranchAbundanceReport> {
    let mut abundant: Vec<ProjectivePoint> = Vec::new();
    let mut certificates = Vec::new();
    let search = RelationSearch::for_modulus(m);
    for (i, u) in candidates.iter().enumerate() {
        for v in candidates.iter().skip(i + 1) {
            if u == v {
                continue;
            }
            let mu = moebius_to_zero_inf(u, v);
            let psi = phi.conjugate(&mu)?;
            let evidence = if let Some(t) = is_trivial(&psi, m) {
                Some(AbundanceEvidence::Trivial(t))
            } else {
                find_relation(&psi, m, &search)?.map(AbundanceEvidence::Relation)
            };
            if let Some(evidence) = evidence {
                let mu_type = classify_mu_type(&psi, m).tag();
                for p in [u, v] {
                    if !abundant.contains(p) {
                        abundant.push(p.clone());
                    }
                }
                certificates.push(AbundanceCertificate {
                    pair: (u.clone(), v.clone()),
                    evidence,
                    mu_type,
                });
            }
        }
    }
    assert!(
        abundant.len() <= 4,
        "more than four m-branch abundant points"
    );
    Ok(BranchAbundanceReport {
        abundant,
        certificates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpoly::UniPoly;
    use std::collections::BTreeMap;

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

    fn mu8() -> RationalMap {
        RationalMap::new(
            &UniPoly::from_ints(&[4, -4]),
            &UniPoly::from_ints(&[4, -4, 1]),
        )
        .unwrap()
    }

    fn type76() -> RationalMap {
        // 144 x (x+3) / (x-9)^2
        RationalMap::new(
            &UniPoly::from_ints(&[0, 432, 144]),
            &UniPoly::from_ints(&[81, -18, 1]),
        )
        .unwrap()
    }

    fn type3(c: i64) -> RationalMap {
        // -C^2 (4x - (C+1)^2)^2 / ((x - C)(4Cx - (C+1)^2)^2)
        let c1 = (c + 1) * (c + 1);
        let num = UniPoly::from_ints(&[-c1, 4]).pow(2).scale(&q(-c * c, 1));
        let den = UniPoly::from_ints(&[-c, 1]).mul(&UniPoly::from_ints(&[-c1, 4 * c]).pow(2));
        RationalMap::new(&num, &den).unwrap()
    }

    #[test]
    fn trivial_examples() {
        // x^3 with m = 3 -> (1, 0, x)
        let cube = RationalMap::from_polynomial(&UniPoly::from_ints(&[0, 0, 0, 1])).unwrap();
        let t = is_trivial(&cube, 3).unwrap();
        assert_eq!(t.c, q(1, 1));
        assert_eq!(t.j, 0);
        assert_eq!(t.psi_num, UniPoly::x());
        // 2x(x+1)^2 with m = 2 -> (2, 1, x+1)
        let m = RationalMap::from_polynomial(
            &UniPoly::from_ints(&[0, 2]).mul(&UniPoly::from_ints(&[1, 1]).pow(2)),
        )
        .unwrap();
        let t = is_trivial(&m, 2).unwrap();
        assert_eq!(t.c, q(2, 1));
        assert_eq!(t.j, 1);
        assert_eq!(t.psi_num, UniPoly::from_ints(&[1, 1]));
        // phi1 is not trivial for m = 4
        assert!(is_trivial(&phi1(), 4).is_none());
    }

    #[test]
    fn exceptional_examples() {
        let power = RationalMap::from_polynomial(&UniPoly::from_ints(&[0, 0, 0, 1])).unwrap();
        let e = exceptional_points(&power);
        assert_eq!(e.len(), 2);
        assert!(e.contains(&ProjectivePoint::from_int(0)));
        assert!(e.contains(&ProjectivePoint::infinity()));

        let poly = RationalMap::from_polynomial(&UniPoly::from_ints(&[1, 0, 1])).unwrap();
        assert_eq!(exceptional_points(&poly), vec![ProjectivePoint::infinity()]);

        assert!(exceptional_points(&phi1()).is_empty());

        // 2/x^2 has the exceptional 2-cycle {0, inf}
        let m = RationalMap::new(&UniPoly::from_ints(&[2]), &UniPoly::from_ints(&[0, 0, 1]))
            .unwrap();
        let e = exceptional_points(&m);
        assert_eq!(e.len(), 2);
    }

    #[test]
    fn postcritical_examples() {
        let b = PortraitBudget::default();
        // x^2 - 2: PCS = {2, -2, inf}, PCF
        let cheb = RationalMap::from_polynomial(&UniPoly::from_ints(&[-2, 0, 1])).unwrap();
        let g = postcritical_graph(&cheb, &b);
        assert!(g.pcf);
        assert_eq!(g.total_degree(), 3);
        assert!(g.node_containing(&ProjectivePoint::from_int(2)).is_some());
        assert!(g.node_containing(&ProjectivePoint::from_int(-2)).is_some());
        assert!(g.node_containing(&ProjectivePoint::infinity()).is_some());
        assert!(g.is_refinement_fixpoint(&cheb));

        // phi1: PCS = {0, -3, inf}
        let g = postcritical_graph(&phi1(), &b);
        assert!(g.pcf);
        assert_eq!(g.total_degree(), 3);
        assert!(g.node_containing(&ProjectivePoint::from_int(-3)).is_some());
        assert!(g.is_refinement_fixpoint(&phi1()));

        // type3family C = 3 is not PCF within budget
        let g = postcritical_graph(&type3(3), &b);
        assert!(!g.pcf);
        assert!(g.truncated);
    }

    #[test]
    fn orbifold_examples() {
        let b = PortraitBudget::default();
        let cheb = RationalMap::from_polynomial(&UniPoly::from_ints(&[-2, 0, 1])).unwrap();
        assert_eq!(
            orbifold_signature(&cheb, &b).unwrap(),
            vec![Weight::Finite(2), Weight::Finite(2), Weight::Infinite]
        );
        assert_eq!(
            orbifold_signature(&phi1(), &b).unwrap(),
            vec![Weight::Finite(2), Weight::Finite(4), Weight::Finite(4)]
        );
        // power map: (inf, inf)
        let sq = RationalMap::from_polynomial(&UniPoly::from_ints(&[0, 0, 1])).unwrap();
        assert_eq!(
            orbifold_signature(&sq, &b).unwrap(),
            vec![Weight::Infinite, Weight::Infinite]
        );
        // x^2 - 1 is PCF but not a finite quotient
        let basilica = RationalMap::from_polynomial(&UniPoly::from_ints(&[-1, 0, 1])).unwrap();
        assert!(orbifold_signature(&basilica, &b).is_none());
        // not PCF within budget
        assert!(orbifold_signature(&type3(3), &b).is_none());
    }

    #[test]
    fn preimage_structure_phi1() {
        let s = preimage_structure(&phi1(), 4, 2);
        // 0 has the single preimage -3 with e = 2 (named beta)
        assert_eq!(s.zero.len(), 1);
        assert_eq!(s.zero[0].ram, 2);
        assert!(!s.zero[0].divisible);
        assert_eq!(s.zero[0].named, Some(ProjectivePoint::from_int(-3)));
        // infinity has preimages {0 (e 1), inf (e 1)}
        assert_eq!(s.infinity.len(), 2);
        assert!(s.infinity.iter().all(|n| n.ram == 1 && !n.divisible));
    }

    #[test]
    fn classify_examples() {
        // phi1 -> (13)
        let t = classify_mu_type(&phi1(), 4);
        assert_eq!(t.tag(), Some(MuTag::T13));
        if let MuType::Tagged { named, .. } = &t {
            assert_eq!(named[0].1, PointSet::of_point(&ProjectivePoint::from_int(-3)));
        }
        // type3family C = 3 -> (3) with the case 5a identity
        let t = classify_mu_type(&type3(3), 2);
        assert_eq!(t.tag(), Some(MuTag::T3));
        if let MuType::Tagged { case5, .. } = &t {
            let c5 = case5.as_ref().unwrap();
            assert_eq!(c5.kind, Case5Kind::A);
            assert_eq!(c5.c, q(3, 1));
        }
        // type76 -> (7,6)
        let t = classify_mu_type(&type76(), 2);
        assert_eq!(t.tag(), Some(MuTag::T76));
        // mu8 -> (8)
        let t = classify_mu_type(&mu8(), 2);
        assert_eq!(t.tag(), Some(MuTag::T8));
        // x^2 + 1 -> unclassified
        let t = classify_mu_type(
            &RationalMap::from_polynomial(&UniPoly::from_ints(&[1, 0, 1])).unwrap(),
            2,
        );
        assert!(matches!(t, MuType::Unclassified(_)));
        // x^4 with m = 4 -> trivial
        let t = classify_mu_type(
            &RationalMap::from_polynomial(&UniPoly::from_ints(&[0, 0, 0, 0, 1])).unwrap(),
            4,
        );
        assert!(matches!(t, MuType::Trivial(_)));
    }

    #[test]
    fn classify_is_inversion_stable() {
        for (map, m) in [(phi1(), 4u32), (type76(), 2), (mu8(), 2), (type3(2), 2)] {
            let t = classify_mu_type(&map, m);
            let tc = classify_mu_type(&map.conjugate_by_inversion(), m);
            assert_eq!(t.tag(), tc.tag(), "tag must survive x -> 1/x");
        }
    }

    #[test]
    fn case5_examples() {
        // phi3 -> case 5a with C = 3
        let c5 = verify_case5_form(&type3(3)).unwrap();
        assert_eq!(c5.kind, Case5Kind::A);
        assert_eq!(c5.c, q(3, 1));
        // -4(x-1)/(x-2)^2 -> case 5c, B = -4, C = 1, h = x
        let c5 = verify_case5_kind(&mu8(), Case5Kind::C).unwrap();
        assert_eq!(c5.b, q(-4, 1));
        assert_eq!(c5.c, q(1, 1));
        assert_eq!(c5.h, UniPoly::x());
        // 144x(x+3)/(x-9)^2 -> case 5d
        let c5 = verify_case5_kind(&type76(), Case5Kind::D).unwrap();
        assert_eq!(c5.c, q(-3, 1));
        assert_eq!(c5.b, q(144, 1));
    }

    #[test]
    fn chebyshev_identities() {
        assert_eq!(chebyshev(2), UniPoly::from_ints(&[-2, 0, 1]));
        assert_eq!(chebyshev(3), UniPoly::from_ints(&[0, -3, 0, 1]));
        // defining identity T_d(x + 1/x) x^d = x^2d + 1 for d <= 8
        for d in 1..=8u32 {
            let td = chebyshev(d);
            let (num, den) =
                compose(&td, &UniPoly::from_ints(&[1, 0, 1]), &UniPoly::x());
            let mut expect = vec![0i64; 2 * d as usize + 1];
            expect[0] = 1;
            expect[2 * d as usize] = 1;
            assert_eq!(num, UniPoly::from_ints(&expect));
            assert_eq!(den, UniPoly::x().pow(d));
        }
        // T_d''(2) = (d^4 - d^2)/6 for d <= 10
        for d in 2..=10u32 {
            let second = chebyshev(d)
                .derivative()
                .derivative()
                .eval(&q(2, 1));
            assert_eq!(second, q((i64::from(d).pow(4) - i64::from(d).pow(2)) / 6, 1));
        }
    }

    #[test]
    fn chebyshev_exception_list() {
        assert_eq!(chebyshev_exception(2), UniPoly::from_ints(&[0, 4, 1]));
        assert_eq!(
            chebyshev_exception(3),
            UniPoly::from_ints(&[-4, -9, -6, -1])
        );
        assert_eq!(
            chebyshev_exception(4),
            UniPoly::from_ints(&[0, 16, 20, 8, 1])
        );
        assert_eq!(
            chebyshev_exception(5),
            UniPoly::from_ints(&[-4, -25, -50, -35, -10, -1])
        );
    }

    #[test]
    fn classify_polynomial_examples() {
        let m = RationalMap::from_polynomial(&UniPoly::from_ints(&[0, 4, 1])).unwrap();
        match classify_polynomial(&m, 2) {
            PolynomialClass::Chebyshev { c, d } => {
                assert_eq!(c, q(1, 1));
                assert_eq!(d, 2);
            }
            other => panic!("expected Chebyshev, got {other:?}"),
        }
        let m = RationalMap::from_polynomial(&chebyshev_exception(3)).unwrap();
        assert!(matches!(
            classify_polynomial(&m, 2),
            PolynomialClass::Chebyshev { d: 3, .. }
        ));
        let m = RationalMap::from_polynomial(&UniPoly::from_ints(&[1, 0, 1])).unwrap();
        assert!(matches!(classify_polynomial(&m, 2), PolynomialClass::Neither));
        let m = RationalMap::from_polynomial(&UniPoly::from_ints(&[0, 0, 9])).unwrap();
        assert!(matches!(classify_polynomial(&m, 2), PolynomialClass::Case1(_)));
    }

    #[test]
    fn branch_abundant_examples() {
        // x^2 - 2, candidates {2, -2, inf, 0} -> {2, -2, inf}
        let cheb = RationalMap::from_polynomial(&UniPoly::from_ints(&[-2, 0, 1])).unwrap();
        let cands = vec![
            ProjectivePoint::from_int(2),
            ProjectivePoint::from_int(-2),
            ProjectivePoint::infinity(),
            ProjectivePoint::from_int(0),
        ];
        let rep = count_branch_abundant(&cheb, 2, &cands).unwrap();
        let mut got = rep.abundant.clone();
        got.sort_by_key(|p| format!("{p}"));
        assert_eq!(got.len(), 3);
        assert!(!rep.abundant.contains(&ProjectivePoint::from_int(0)));

        // x^d -> {0, inf}
        let power = RationalMap::from_polynomial(&UniPoly::from_ints(&[0, 0, 0, 1])).unwrap();
        let cands = vec![
            ProjectivePoint::from_int(0),
            ProjectivePoint::infinity(),
            ProjectivePoint::from_int(1),
        ];
        let rep = count_branch_abundant(&power, 2, &cands).unwrap();
        assert_eq!(rep.abundant.len(), 2);
        assert!(!rep.abundant.contains(&ProjectivePoint::from_int(1)));

        // phi1, m = 4, {0, inf, -3} -> {0, inf}
        let cands = vec![
            ProjectivePoint::from_int(0),
            ProjectivePoint::infinity(),
            ProjectivePoint::from_int(-3),
        ];
        let rep = count_branch_abundant(&phi1(), 4, &cands).unwrap();
        assert_eq!(rep.abundant.len(), 2);
        assert!(!rep.abundant.contains(&ProjectivePoint::from_int(-3)));
    }

    /// Synthetic preimage source: a hand-built structure table, used to
    /// exercise catalog rows that no map over Q realizes.
    struct Synthetic {
        degree: usize,
        fibers: BTreeMap<String, Fiber>,
        images: BTreeMap<String, ProjectivePoint>,
    }

    impl Synthetic {
        fn key(v: &ProjectivePoint) -> String {
            format!("{v}")
        }
    }

    impl PreimageSource for Synthetic {
        fn map_degree(&self) -> usize {
            self.degree
        }
        fn fiber_of(&self, v: &ProjectivePoint) -> Fiber {
            self.fibers
                .get(&Self::key(v))
                .cloned()
                .unwrap_or(Fiber {
                    layers: Vec::new(),
                    at_infinity: None,
                })
        }
        fn image_of(&self, v: &ProjectivePoint) -> ProjectivePoint {
            self.images
                .get(&Self::key(v))
                .cloned()
                .unwrap_or_else(ProjectivePoint::infinity)
        }
    }

    fn lin(r: i64) -> UniPoly {
        UniPoly::from_ints(&[-r, 1])
    }

    #[test]
    fn synthetic_structures_match_unreachable_rows() {
        // (3,1): inf fixed simple, 3-cycle 0 -> gamma -> beta -> 0, all
        // odd indices; divisible elsewhere. Use degree 5.
        let mut fibers = BTreeMap::new();
        let mut images = BTreeMap::new();
        fibers.insert(
            "inf".into(),
            Fiber {
                layers: vec![(2, UniPoly::from_ints(&[7, 1])), (2, UniPoly::from_ints(&[11, 1]))],
                at_infinity: Some(1),
            },
        );
        // fiber(0) odd part = beta = 3
        fibers.insert(
            "0".into(),
            Fiber {
                layers: vec![(1, lin(3)), (2, UniPoly::from_ints(&[13, 1])), (2, lin(17))],
                at_infinity: None,
            },
        );
        // fiber(3) odd part = gamma = 5
        fibers.insert(
            "3".into(),
            Fiber {
                layers: vec![(1, lin(5)), (2, lin(19)), (2, lin(23))],
                at_infinity: None,
            },
        );
        // fiber(5) odd part = {0}
        fibers.insert(
            "5".into(),
            Fiber {
                layers: vec![(1, UniPoly::x()), (2, lin(29)), (2, lin(31))],
                at_infinity: None,
            },
        );
        images.insert("0".into(), ProjectivePoint::from_int(5));
        let s = Synthetic {
            degree: 5,
            fibers,
            images,
        };
        let hit = match_mu_tag(&s, 2).unwrap();
        assert_eq!(hit.tag, MuTag::T31);

        // (11b): 2-cycle inf <-> 3; odd(inf) = {0, 3}; odd(3) = {inf, 5};
        // gamma = 5 fully even. Degree 4.
        let mut fibers = BTreeMap::new();
        let mut images = BTreeMap::new();
        fibers.insert(
            "inf".into(),
            Fiber {
                layers: vec![(1, UniPoly::x().mul(&lin(3)).monic()), (2, lin(7))],
                at_infinity: None,
            },
        );
        fibers.insert(
            "3".into(),
            Fiber {
                layers: vec![(1, lin(5)), (2, lin(11))],
                at_infinity: Some(1),
            },
        );
        fibers.insert(
            "0".into(),
            Fiber {
                layers: vec![(2, lin(13)), (2, lin(17))],
                at_infinity: None,
            },
        );
        fibers.insert(
            "5".into(),
            Fiber {
                layers: vec![(2, lin(19)), (2, lin(23))],
                at_infinity: None,
            },
        );
        images.insert("3".into(), ProjectivePoint::infinity());
        let s = Synthetic {
            degree: 4,
            fibers,
            images,
        };
        let hit = match_mu_tag(&s, 2).unwrap();
        assert_eq!(hit.tag, MuTag::T11b);

        // (11c): 2-cycle inf <-> 3; odd(inf) = {3, 5}; odd(3) = {0, inf}.
        let mut fibers = BTreeMap::new();
        let mut images = BTreeMap::new();
        fibers.insert(
            "inf".into(),
            Fiber {
                layers: vec![(1, lin(3).mul(&lin(5)).monic()), (2, lin(7))],
                at_infinity: None,
            },
        );
        fibers.insert(
            "3".into(),
            Fiber {
                layers: vec![(1, UniPoly::x()), (2, lin(11))],
                at_infinity: Some(1),
            },
        );
        fibers.insert(
            "5".into(),
            Fiber {
                layers: vec![(2, lin(13)), (2, lin(17))],
                at_infinity: None,
            },
        );
        images.insert("3".into(), ProjectivePoint::infinity());
        let s = Synthetic {
            degree: 4,
            fibers,
            images,
        };
        let hit = match_mu_tag(&s, 2).unwrap();
        assert_eq!(hit.tag, MuTag::T11c);

        // (11a): 2-cycle 0 <-> inf; odd(inf) = {0, 3}; odd(0) = {inf, 5}.
        let mut fibers = BTreeMap::new();
        let mut images = BTreeMap::new();
        fibers.insert(
            "inf".into(),
            Fiber {
                layers: vec![(1, UniPoly::x().mul(&lin(3)).monic()), (2, lin(7))],
                at_infinity: None,
            },
        );
        fibers.insert(
            "0".into(),
            Fiber {
                layers: vec![(1, lin(5)), (2, lin(11))],
                at_infinity: Some(1),
            },
        );
        fibers.insert(
            "3".into(),
            Fiber {
                layers: vec![(2, lin(13)), (2, lin(17))],
                at_infinity: None,
            },
        );
        fibers.insert(
            "5".into(),
            Fiber {
                layers: vec![(2, lin(19)), (2, lin(23))],
                at_infinity: None,
            },
        );
        let s = Synthetic {
            degree: 4,
            fibers,
            images,
        };
        let hit = match_mu_tag(&s, 2).unwrap();
        assert_eq!(hit.tag, MuTag::T11a);
    }
}
