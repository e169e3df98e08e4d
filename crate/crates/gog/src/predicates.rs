//! Structural predicates on splittings: reducedness variants, elementary
//! bipartiteness, and the bounded check that maximal abelian non-cyclic
//! subgroups are elliptic.

use crate::bass_serre::{is_elliptic, Ellipticity};
use crate::config::Bounds;
use crate::graph::{End, GraphOfGroups};
use crate::group::{GroupClass, Tri};
use crate::word::Word;
use crate::word_problem;
use serde::{Deserialize, Serialize};

/// Three-valued outcome of the bounded class-membership check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ClassD {
    Yes,
    No { witness: String },
    Unknown { reason: String },
}

/// Predicate report with violation witnesses. A `false` flag always comes
/// with at least one entry in `witnesses`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Predicates {
    pub is_reduced: bool,
    pub is_semi_reduced: bool,
    pub is_almost_reduced: bool,
    pub is_bipartite_elementary: bool,
    pub in_class_d: ClassD,
    pub witnesses: Vec<String>,
}

fn is_elementary(g: &GraphOfGroups, v: &crate::graph::VertexId) -> bool {
    matches!(g.vertex(v).class(), GroupClass::Abelian)
}

fn is_flexible(g: &GraphOfGroups, v: &crate::graph::VertexId) -> bool {
    matches!(g.vertex(v).class(), GroupClass::Surface(sig) if sig.is_admissible_qh())
}

pub fn predicates(g: &GraphOfGroups, bounds: &Bounds) -> Predicates {
    let mut witnesses = Vec::new();
    let mut is_reduced = true;
    let mut is_semi_reduced = true;
    let mut is_almost_reduced = true;
    let mut is_bipartite = true;

    // full-image table per edge end
    let mut full: Vec<(crate::graph::EdgeId, End, Tri)> = Vec::new();
    for (id, _) in g.edges() {
        for end in [End::Alpha, End::Omega] {
            full.push((id.clone(), end, g.image_is_whole_vertex(id, end)));
        }
    }
    let end_full = |id: &crate::graph::EdgeId, end: End| -> &Tri {
        &full.iter().find(|(i, e, _)| i == id && *e == end).unwrap().2
    };

    // reduced: a vertex of valency ≤ 2 must properly contain its adjacent
    // edge groups
    for (v, _) in g.vertices() {
        let inc = g.incidences(v);
        if inc.len() > 2 {
            continue;
        }
        for (id, end) in &inc {
            if end_full(id, *end).is_trivial() {
                is_reduced = false;
                witnesses.push(format!(
                    "reduced: edge {id} fills the valency-{} vertex {v}",
                    inc.len()
                ));
            }
        }
    }

    // semi-reduced: an edge filling an endpoint must not be a loop, the
    // filled endpoint keeps valency ≥ 2, and the other end stays proper
    for (id, e) in g.edges() {
        for end in [End::Alpha, End::Omega] {
            if !end_full(id, end).is_trivial() {
                continue;
            }
            let v = e.endpoint(end);
            let u = e.endpoint(end.other());
            if v == u {
                is_semi_reduced = false;
                witnesses.push(format!("semi-reduced: loop {id} fills its vertex {v}"));
                continue;
            }
            if g.valency(v) < 2 {
                is_semi_reduced = false;
                witnesses.push(format!("semi-reduced: edge {id} fills the valency-1 vertex {v}"));
            }
            if end_full(id, end.other()).is_trivial() {
                is_semi_reduced = false;
                witnesses.push(format!("semi-reduced: edge {id} fills both endpoints"));
            }
        }
    }

    // almost reduced: a filled endpoint forces the other endpoint to be a
    // QH vertex, the filled vertex has valency exactly 2, and the second
    // edge there is proper with a QH far endpoint. The source definition
    // swaps its endpoint names mid-sentence; this reading is flagged.
    for (id, e) in g.edges() {
        for end in [End::Alpha, End::Omega] {
            if !end_full(id, end).is_trivial() {
                continue;
            }
            let v = e.endpoint(end).clone();
            let u = e.endpoint(end.other()).clone();
            let mut ok = is_flexible(g, &u) && g.valency(&v) == 2;
            if ok {
                for (fid, fend) in g.incidences(&v) {
                    if fid == *id {
                        continue;
                    }
                    let far = g.edge(&fid).endpoint(fend.other()).clone();
                    if end_full(&fid, fend).is_trivial() || !is_flexible(g, &far) {
                        ok = false;
                    }
                }
            }
            if !ok {
                is_almost_reduced = false;
                witnesses.push(format!(
                    "almost-reduced: edge {id} fills {v} without the QH neighborhood \
                     (endpoint naming in the defining text is ambiguous; both are checked)"
                ));
            }
        }
    }

    // bipartite: non-silver edges always join an elementary vertex to a
    // non-elementary one
    for (id, e) in g.edges() {
        if e.silver {
            continue;
        }
        let (a, b) = (is_elementary(g, &e.from), is_elementary(g, &e.to));
        if a == b {
            is_bipartite = false;
            witnesses.push(format!(
                "bipartite: edge {id} joins two {} vertices",
                if a { "elementary" } else { "non-elementary" }
            ));
        }
    }

    // class D: the maximal abelian subgroup around each edge image must be
    // elliptic; the bounded probe looks for commuting stable letters and
    // then for a common fixed vertex
    let mut class_d = ClassD::Yes;
    let mut notes = Vec::new();
    'edges: for (id, e) in g.edges() {
        if e.rank == 0 {
            continue;
        }
        let a = e.alpha[0].clone();
        let mut companions: Vec<Word> = vec![a.clone()];
        for (fid, fe) in g.edges() {
            if fe.tree {
                continue;
            }
            let t = Word::gen(g.stable_sym(&fid));
            match word_problem::is_trivial(g, &Word::commutator(&t, &a)) {
                Tri::Trivial => companions.push(t),
                Tri::NonTrivial => {}
                Tri::Unknown(r) => notes.push(format!("edge {id}: commutation with t_{fid}: {r}")),
            }
        }
        if companions.len() == 1 {
            continue; // cyclic ambient subgroup along the vertex, nothing to check
        }
        match is_elliptic(g, &companions, bounds) {
            Ok(Ellipticity::Yes { .. }) => {}
            Ok(Ellipticity::NoEvidence { reason }) => {
                class_d = ClassD::No {
                    witness: format!(
                        "edge {id}: ambient maximal abelian subgroup of {a} is not elliptic ({reason})"
                    ),
                };
                break 'edges;
            }
            Err(err) => {
                notes.push(format!("edge {id}: ellipticity probe abstained: {err}"));
            }
        }
    }
    if matches!(class_d, ClassD::Yes) && !notes.is_empty() {
        class_d = ClassD::Unknown { reason: notes.join("; ") };
    }
    witnesses.extend(notes);

    Predicates {
        is_reduced,
        is_semi_reduced,
        is_almost_reduced,
        is_bipartite_elementary: is_bipartite,
        in_class_d: class_d,
        witnesses,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::*;
    use crate::graph::{eid, vid, Edge};
    use crate::group::GroupHandle;
    use crate::word::{sym, word};

    #[test]
    fn valency_one_full_edge_fails_reducedness() {
        // a leaf whose edge group is the whole leaf group
        let mut g = GraphOfGroups::new();
        g.add_vertex(vid("a"), GroupHandle::free_named(vec![sym("x"), sym("y")]));
        g.add_vertex(vid("z"), GroupHandle::abelian_named(vec![sym("m")]));
        g.add_edge(
            eid("e"),
            Edge {
                from: vid("z"),
                to: vid("a"),
                rank: 1,
                alpha: vec![word("m")],
                omega: vec![word("x")],
                tree: true,
                silver: false,
            },
        );
        let p = predicates(&g, &Bounds::default());
        assert!(!p.is_reduced);
        assert!(!p.is_semi_reduced);
        assert!(p.witnesses.iter().any(|w| w.contains("valency-1")));
    }

    #[test]
    fn bipartite_star_passes() {
        let g = normalized_double();
        let p = predicates(&g, &Bounds::default());
        assert!(p.is_bipartite_elementary);
        assert!(p.is_semi_reduced);
        assert!(matches!(p.in_class_d, ClassD::Yes));
    }

    #[test]
    fn two_abelian_vertices_joined_fail_bipartite() {
        let mut g = GraphOfGroups::new();
        g.add_vertex(vid("y"), GroupHandle::abelian_named(vec![sym("m")]));
        g.add_vertex(vid("z"), GroupHandle::abelian_named(vec![sym("n")]));
        g.add_edge(
            eid("e"),
            Edge {
                from: vid("y"),
                to: vid("z"),
                rank: 1,
                alpha: vec![word("m")],
                omega: vec![word("n^2")],
                tree: true,
                silver: false,
            },
        );
        let p = predicates(&g, &Bounds::default());
        assert!(!p.is_bipartite_elementary);
    }

    #[test]
    fn raw_double_is_not_bipartite_but_in_class_d() {
        let g = double_xy_uv();
        let p = predicates(&g, &Bounds::default());
        assert!(!p.is_bipartite_elementary);
        assert!(matches!(p.in_class_d, ClassD::Yes));
    }

    #[test]
    fn z2_hnn_is_outside_class_d() {
        let g = hnn_z2();
        let b = Bounds { radius: 2, rep_len: 4, conj_len: 6, ..Bounds::default() };
        let p = predicates(&g, &b);
        match p.in_class_d {
            ClassD::No { witness } => assert!(witness.contains("not elliptic")),
            other => panic!("expected No, got {other:?}"),
        }
    }

    #[test]
    fn predicates_stable_under_conjugation() {
        use crate::moves::{apply_move, Move};
        let g = normalized_double();
        let before = predicates(&g, &Bounds::default());
        let moved = apply_move(
            &g,
            &Move::Conjugate { vertex: vid("a"), element: word("x y") },
        )
        .unwrap();
        let after = predicates(&moved.graph, &Bounds::default());
        assert_eq!(before.is_reduced, after.is_reduced);
        assert_eq!(before.is_semi_reduced, after.is_semi_reduced);
        assert_eq!(before.is_bipartite_elementary, after.is_bipartite_elementary);
    }
}
