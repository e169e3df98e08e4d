//! Generators of the canonical outer-automorphism subgroup of a splitting:
//! Dehn twists along edges, peripheral-preserving automorphisms of
//! elementary vertices, and mapping-class generators for the flexible
//! signatures with explicit classical actions. The report states the
//! virtual direct-product shape with an upper bound on the twist rank.

use crate::config::Bounds;
use crate::error::GogError;
use crate::graph::{EdgeId, GraphOfGroups, VertexId};
use crate::group::{Centralizer, GroupClass, GroupHandle, Tri};
use crate::lattice::Lattice;
use crate::matrix::Mat;
use crate::moves::dehn_twist;
use crate::presentation::{GroupMap, MapStatus};
use crate::surface::SurfaceSig;
use crate::word::{Sym, Word};
use crate::word_problem;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One generalized Dehn twist generator.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwistGen {
    pub edge: EdgeId,
    pub parameter: Word,
    pub map: GroupMap,
    /// The twist acts as an inner automorphism (detected at bounded scale).
    pub inner: bool,
}

/// A flexible-vertex factor: realized generators where the classical twist
/// action is explicit, a named stub otherwise.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlexibleFactor {
    pub vertex: VertexId,
    pub signature: SurfaceSig,
    pub realized: Vec<GroupMap>,
    pub stub: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct OutReport {
    pub twists: Vec<TwistGen>,
    /// Per elementary vertex: generators of the peripheral-tuple stabilizer
    /// in the unimodular group, found by bounded search (not complete).
    pub elementary: BTreeMap<VertexId, Vec<Mat>>,
    pub flexible: Vec<FlexibleFactor>,
    /// Upper bound for the rank of the free abelian twist factor.
    pub twist_rank_upper: usize,
    /// `Z^d × M × Q^` with the factor inventories spelled out.
    pub shape: String,
    pub notes: Vec<String>,
}

/// Basis of the centralizer of the edge image inside the initial vertex
/// group: the whole basis for an abelian endpoint, the cyclic root
/// otherwise.
fn twist_parameters(g: &GraphOfGroups, e: &EdgeId) -> Result<Vec<Word>, GogError> {
    let edge = g.edge(e);
    if edge.rank == 0 {
        return Ok(vec![]);
    }
    let handle = g.vertex(&edge.from);
    match handle.class() {
        GroupClass::Abelian => {
            Ok(handle.gens().iter().map(|s| Word::gen(s.clone())).collect())
        }
        _ => match handle.centralizer(&edge.alpha[0]) {
            Centralizer::Cyclic { root, .. } => Ok(vec![root]),
            Centralizer::WholeGroup => {
                Ok(handle.gens().iter().map(|s| Word::gen(s.clone())).collect())
            }
            Centralizer::Unknown(r) => Err(GogError::Abstained(r)),
        },
    }
}

/// Bounded innerness check: is the twist conjugation by some short word
/// built from the parameter?
fn is_inner(g: &GraphOfGroups, map: &GroupMap, parameter: &Word) -> bool {
    let gens = map.source.gens.clone();
    let identity = gens.iter().all(|s| map.forward[s] == Word::gen(s.clone()));
    if identity {
        return true;
    }
    for k in [1i64, -1, 2, -2] {
        let c = parameter.pow(k);
        let inner_all = gens.iter().all(|s| {
            let moved = map.forward[s].clone();
            let conj = Word::gen(s.clone()).conjugate_by(&c);
            word_problem::is_trivial(g, &moved.mul(&conj.inverse())).is_trivial()
        });
        if inner_all {
            return true;
        }
    }
    false
}

/// One verified twist per (edge, centralizer-basis parameter).
pub fn twist_generators(g: &GraphOfGroups) -> Result<Vec<TwistGen>, GogError> {
    let mut out = Vec::new();
    for (id, _) in g.edges() {
        for parameter in twist_parameters(g, id)? {
            let map = dehn_twist(g, id, &parameter)?;
            let inner = is_inner(g, &map, &parameter);
            out.push(TwistGen { edge: id.clone(), parameter, map, inner });
        }
    }
    Ok(out)
}

/// Generators of `{ U ∈ GL_n(Z) : A_i·U = A_i for all i }` found within an
/// entry bound; completeness is not claimed.
pub fn elementary_auto_generators(n: usize, peripherals: &[Lattice], bound: i64) -> Vec<Mat> {
    let mut found: Vec<Mat> = Vec::new();
    let total = n * n;
    let mut flat = vec![-bound; total];
    loop {
        let rows: Vec<Vec<i64>> = flat.chunks(n).map(|c| c.to_vec()).collect();
        let u = Mat::from_rows(rows);
        if u.det().abs() == 1
            && u != Mat::identity(n)
            && peripherals.iter().all(|l| l.transform(&u).unwrap() == *l)
        {
            found.push(u);
        }
        let mut i = 0;
        loop {
            if i == total {
                return reduce_to_generators(n, found);
            }
            flat[i] += 1;
            if flat[i] <= bound {
                break;
            }
            flat[i] = -bound;
            i += 1;
        }
    }
}

/// Greedy generating subset: keep a matrix only when it is not already in
/// the closure of the kept ones (products up to a short length).
fn reduce_to_generators(n: usize, found: Vec<Mat>) -> Vec<Mat> {
    let mut gens: Vec<Mat> = Vec::new();
    let mut closure: Vec<Mat> = vec![Mat::identity(n)];
    for u in found {
        if closure.contains(&u) {
            continue;
        }
        gens.push(u.clone());
        // refresh the closure under the kept generators, keeping entries
        // small: the group may be infinite and only the bounded chunk
        // matters for deduplication
        let bounded = |m: &Mat| (0..n).all(|r| m.row(r).iter().all(|x| x.abs() <= 16));
        let mut grown = true;
        while grown && closure.len() < 4096 {
            grown = false;
            let snapshot = closure.clone();
            for a in &snapshot {
                for g in &gens {
                    for m in [a.mul(g), a.mul(&g.unimodular_inverse())] {
                        if bounded(&m) && !closure.contains(&m) {
                            closure.push(m);
                            grown = true;
                        }
                    }
                }
            }
        }
    }
    gens
}

/// Explicit mapping-class generators for the one-holed torus and the
/// four-holed sphere; other signatures come back as named stubs.
fn flexible_generators(
    g: &GraphOfGroups,
    v: &VertexId,
    handle: &GroupHandle,
    sig: &SurfaceSig,
) -> FlexibleFactor {
    let single = |maps: Vec<BTreeMap<Sym, Word>>| -> Vec<GroupMap> {
        let p = handle.presentation();
        maps.into_iter()
            .filter_map(|fwd| {
                let map = GroupMap::new(p.clone(), p.clone(), fwd);
                let mut sv = GraphOfGroups::new();
                sv.add_vertex(v.clone(), handle.clone());
                let (map, _) = word_problem::verify_homomorphism(&map, &sv);
                if map.status >= MapStatus::VerifiedHom {
                    Some(map)
                } else {
                    None
                }
            })
            .collect()
    };
    let gens = handle.gens();
    if *sig == SurfaceSig::new(true, 1, 1) {
        // ⟨p, a, b | p[a,b]⟩: the two classical twists fix the boundary
        let (p, a, b) = (gens[0].clone(), gens[1].clone(), gens[2].clone());
        let mut ta: BTreeMap<Sym, Word> = BTreeMap::new();
        ta.insert(p.clone(), Word::gen(p.clone()));
        ta.insert(a.clone(), Word::gen(a.clone()));
        ta.insert(b.clone(), Word::gen(b.clone()).mul(&Word::gen(a.clone())));
        let mut tb: BTreeMap<Sym, Word> = BTreeMap::new();
        tb.insert(p.clone(), Word::gen(p.clone()));
        tb.insert(a.clone(), Word::gen(a.clone()).mul(&Word::gen(b.clone())));
        tb.insert(b.clone(), Word::gen(b.clone()));
        FlexibleFactor {
            vertex: v.clone(),
            signature: *sig,
            realized: single(vec![ta, tb]),
            stub: None,
        }
    } else if *sig == SurfaceSig::new(true, 0, 4) {
        // ⟨p1..p4 | p1p2p3p4⟩: half-twist actions on adjacent punctures
        let mut maps = Vec::new();
        for i in 0..3 {
            let mut m: BTreeMap<Sym, Word> = gens
                .iter()
                .map(|s| (s.clone(), Word::gen(s.clone())))
                .collect();
            let (pi, pj) = (gens[i].clone(), gens[i + 1].clone());
            m.insert(
                pi.clone(),
                Word::gen(pi.clone()).mul(&Word::gen(pj.clone())).mul(&Word::gen(pi.clone()).inverse()),
            );
            m.insert(pj, Word::gen(pi));
            maps.push(m);
        }
        FlexibleFactor { vertex: v.clone(), signature: *sig, realized: single(maps), stub: None }
    } else {
        FlexibleFactor {
            vertex: v.clone(),
            signature: *sig,
            realized: vec![],
            stub: Some(format!(
                "mapping class group of ({}, genus {}, punctures {})",
                if sig.orientable { "orientable" } else { "non-orientable" },
                sig.genus,
                sig.punctures
            )),
        }
    }
}

pub fn out_structure_report(g: &GraphOfGroups, _bounds: &Bounds) -> Result<OutReport, GogError> {
    g.validate()?;
    let twists = twist_generators(g)?;
    let mut elementary = BTreeMap::new();
    let mut flexible = Vec::new();
    for (v, handle) in g.vertices() {
        match handle.class() {
            GroupClass::Abelian => {
                let peripherals: Vec<Lattice> = g
                    .incidences(v)
                    .into_iter()
                    .map(|(e, end)| {
                        let rows = g
                            .edge(&e)
                            .images(end)
                            .iter()
                            .map(|w| handle.word_to_vector(w))
                            .collect();
                        Lattice::span(handle.rank(), rows).expect("validated")
                    })
                    .collect();
                let bound = if handle.rank() <= 2 { 2 } else { 1 };
                elementary
                    .insert(v.clone(), elementary_auto_generators(handle.rank(), &peripherals, bound));
            }
            GroupClass::Surface(sig) if sig.is_admissible_qh() => {
                flexible.push(flexible_generators(g, v, handle, sig));
            }
            _ => {}
        }
    }
    // twists along the edges of one elementary vertex with a common
    // parameter compose to an inner automorphism, one relation per
    // (vertex, basis direction)
    let live_twists = twists.iter().filter(|t| !t.inner).count();
    let mut relations = 0usize;
    for (v, handle) in g.vertices() {
        if handle.is_abelian_class() && g.valency(v) >= 1 {
            relations += handle.rank() * (1);
        }
    }
    let twist_rank_upper = live_twists.saturating_sub(relations.min(live_twists));
    let m_inventory: Vec<String> = elementary
        .iter()
        .map(|(v, gens)| format!("M_{v}⟨{} generators⟩", gens.len()))
        .collect();
    let q_inventory: Vec<String> = flexible
        .iter()
        .map(|f| {
            format!(
                "Q_{}⟨{}⟩",
                f.vertex,
                if f.realized.is_empty() { "stub" } else { "realized" }
            )
        })
        .collect();
    let shape = format!(
        "Z^d (d ≤ {twist_rank_upper}) × M[{}] × Q^[{}]",
        m_inventory.join(", "),
        q_inventory.join(", ")
    );
    let mut notes = vec![
        "elementary stabilizer generators are a bounded search; completeness not claimed".into(),
        "the exact twist rank d is not computed; only the generator inventory bounds it".into(),
    ];
    if twists.iter().any(|t| t.inner) {
        notes.push("twists acting as inner automorphisms are flagged and not counted".into());
    }
    Ok(OutReport { twists, elementary, flexible, twist_rank_upper, shape, notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::*;
    use crate::graph::vid;
    use crate::word::{sym, word};

    #[test]
    fn double_has_one_twist_parameter() {
        // the centralizer of ⟨x²y³⟩ in F(x,y) is the cyclic edge group
        let g = double_xy_uv();
        let twists = twist_generators(&g).unwrap();
        assert_eq!(twists.len(), 1);
        assert_eq!(twists[0].parameter, word("x^2 y^3"));
        assert_eq!(twists[0].map.status, MapStatus::VerifiedIso);
        assert!(!twists[0].inner);
    }

    #[test]
    fn star_center_contributes_basis_twists() {
        // abelian(2) center with two leaves: two basis parameters per edge
        let mut g = star_abelian_center();
        g.add_vertex(vid("b"), GroupHandle::free_named(vec![sym("u"), sym("v")]));
        g.add_edge(
            crate::graph::eid("f"),
            crate::graph::Edge {
                from: vid("m"),
                to: vid("b"),
                rank: 1,
                alpha: vec![word("m2")],
                omega: vec![word("u^2 v^3")],
                tree: true,
                silver: false,
            },
        );
        let twists = twist_generators(&g).unwrap();
        assert_eq!(twists.len(), 4);
        assert!(twists.iter().all(|t| t.map.status == MapStatus::VerifiedIso));
    }

    #[test]
    fn empty_graph_has_no_twists() {
        let g = single_free_vertex(2);
        assert!(twist_generators(&g).unwrap().is_empty());
    }

    #[test]
    fn twists_with_common_parameter_compose_to_parameter_product() {
        // β_a ∘ β_b = β_{ab} along one edge, checked on generators
        let g = double_xy_uv();
        let a = word("x^2 y^3");
        let t1 = crate::moves::dehn_twist(&g, &crate::graph::eid("e"), &a).unwrap();
        let t2 = crate::moves::dehn_twist(&g, &crate::graph::eid("e"), &a.pow(2)).unwrap();
        let composed = t1.compose(&t1).unwrap();
        for s in &composed.source.gens {
            let lhs = composed.forward[s].clone();
            let rhs = t2.forward[s].clone();
            assert!(
                word_problem::is_trivial(&g, &lhs.mul(&rhs.inverse())).is_trivial(),
                "generator {s}"
            );
        }
    }

    #[test]
    fn sign_matrices_stabilize_coordinate_peripherals() {
        let p = vec![
            Lattice::span(2, vec![vec![1, 0]]).unwrap(),
            Lattice::span(2, vec![vec![0, 1]]).unwrap(),
        ];
        let gens = elementary_auto_generators(2, &p, 2);
        assert!(!gens.is_empty());
        for u in &gens {
            assert!(u.det().abs() == 1);
            assert!(p.iter().all(|l| l.transform(u).unwrap() == *l));
            // diagonal sign matrices only
            assert_eq!(u[(0, 1)], 0);
            assert_eq!(u[(1, 0)], 0);
        }
    }

    #[test]
    fn rank_one_stabilizer_is_negation() {
        let p = vec![Lattice::span(1, vec![vec![2]]).unwrap()];
        let gens = elementary_auto_generators(1, &p, 2);
        assert_eq!(gens.len(), 1);
        assert_eq!(gens[0][(0, 0)], -1);
    }

    #[test]
    fn full_lattice_peripheral_leaves_everything() {
        let p = vec![Lattice::full(2)];
        let gens = elementary_auto_generators(2, &p, 1);
        // generates the whole bounded chunk of GL₂(Z)
        assert!(gens.len() >= 2);
    }

    #[test]
    fn report_for_normalized_double() {
        let g = normalized_double();
        let report = out_structure_report(&g, &Bounds::default()).unwrap();
        // two edge twists with one inner relation: rank bound 1
        assert_eq!(report.twists.len(), 2);
        assert_eq!(report.twist_rank_upper, 1);
        assert!(report.shape.contains("d ≤ 1"));
        assert!(report.flexible.is_empty());
    }

    #[test]
    fn flexible_stub_for_unrealized_signature() {
        let g = surface_leaf_star();
        let report = out_structure_report(&g, &Bounds::default()).unwrap();
        assert_eq!(report.flexible.len(), 1);
        assert!(report.flexible[0].stub.is_none(), "one-holed torus is realized");
        assert_eq!(report.flexible[0].realized.len(), 2);
    }

    #[test]
    fn distinct_edge_twists_commute_up_to_inner() {
        let g = normalized_double();
        let twists = twist_generators(&g).unwrap();
        assert_eq!(twists.len(), 2);
        let (t1, t2) = (&twists[0].map, &twists[1].map);
        let ab = t1.compose(t2).unwrap();
        let ba = t2.compose(t1).unwrap();
        for s in &ab.source.gens {
            let diff = ab.forward[s].mul(&ba.forward[s].inverse());
            assert!(word_problem::is_trivial(&g, &diff).is_trivial(), "generator {s}");
        }
    }
}
