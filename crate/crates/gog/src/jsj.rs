//! Normalization of a splitting into the canonical bipartite form: group
//! edges by the maximal abelian subgroup carrying their images, give each
//! such subgroup an elementary vertex, slide edges into stars, rewrite
//! cycles, and absorb redundancies. The output comes with a verified
//! isomorphism back to the input's fundamental group.

use crate::config::Bounds;
use crate::error::GogError;
use crate::graph::{eid, vid, Edge, End, EdgeId, GraphOfGroups, VertexId};
use crate::group::{Centralizer, GroupHandle, Tri};
use crate::moves::{apply_move, Move};
use crate::presentation::{GroupMap, MapStatus};
use crate::word::{sym, Word};
use crate::word_problem::{self, Membership};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// The edges whose boundary images share one maximal abelian subgroup,
/// together with the elementary vertex that carries it (when present).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbelianSubgraph {
    /// Centralizer description of the subgroup.
    pub description: String,
    /// Elementary vertex stabilized by the subgroup, once one exists.
    pub home: Option<VertexId>,
    /// Edges whose α-image lies in the subgroup.
    pub edges: BTreeSet<EdgeId>,
    /// Subset flagged silver (full maximal abelian images on both sides).
    pub silver: BTreeSet<EdgeId>,
}

/// One end of an edge, the unit the classification works on.
type EdgeEnd = (EdgeId, End);

fn end_images<'g>(g: &'g GraphOfGroups, (e, end): &EdgeEnd) -> &'g [Word] {
    g.edge(e).images(*end)
}

/// Union-find partition of edge ends by commutation of their images in
/// the fundamental group. Abstentions never merge classes.
fn end_classes(g: &GraphOfGroups, notes: &mut Vec<String>) -> Vec<Vec<EdgeEnd>> {
    let ends: Vec<EdgeEnd> = g
        .edges()
        .iter()
        .filter(|(_, e)| e.rank > 0)
        .flat_map(|(id, _)| [(id.clone(), End::Alpha), (id.clone(), End::Omega)])
        .collect();
    let mut parent: Vec<usize> = (0..ends.len()).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..ends.len() {
        for j in i + 1..ends.len() {
            let (a, b) = (&end_images(g, &ends[i])[0], &end_images(g, &ends[j])[0]);
            match word_problem::is_trivial(g, &Word::commutator(a, b)) {
                Tri::Trivial => {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri] = rj;
                    }
                }
                Tri::NonTrivial => {}
                Tri::Unknown(r) => {
                    notes.push(format!(
                        "commutation of {}/{:?} with {}/{:?} undecided: {r}",
                        ends[i].0, ends[i].1, ends[j].0, ends[j].1
                    ));
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<EdgeEnd>> = BTreeMap::new();
    for i in 0..ends.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(ends[i].clone());
    }
    groups.into_values().collect()
}

/// `w = r^k` in the fundamental group, scanned over a bounded window.
fn pi1_power_of(g: &GraphOfGroups, w: &Word, r: &Word, window: i64) -> Option<i64> {
    for k in 0..=window {
        for k in if k == 0 { vec![0] } else { vec![k, -k] } {
            if word_problem::is_trivial(g, &w.mul(&r.pow(-k))).is_trivial() {
                return Some(k);
            }
        }
    }
    None
}

/// Chooses the root generating the class's maximal abelian subgroup: a
/// vertex-level centralizer root whose powers cover every image in the
/// class, tested in the fundamental group.
fn class_root(g: &GraphOfGroups, class: &[EdgeEnd], notes: &mut Vec<String>) -> Option<(VertexId, Word)> {
    let mut candidates: Vec<(VertexId, Word)> = Vec::new();
    for end in class {
        let v = g.edge(&end.0).endpoint(end.1).clone();
        let handle = g.vertex(&v);
        if handle.is_abelian_class() {
            continue;
        }
        match handle.centralizer(&end_images(g, end)[0]) {
            Centralizer::Cyclic { root, .. } => candidates.push((v, root)),
            Centralizer::WholeGroup => {}
            Centralizer::Unknown(r) => notes.push(format!("root extraction abstained: {r}")),
        }
    }
    candidates.sort_by_key(|(v, w)| (w.len(), w.display(), v.clone()));
    candidates.dedup();
    'cand: for (v, root) in &candidates {
        for end in class {
            let img = &end_images(g, end)[0];
            let window = (img.len() + root.len()) as i64 + 4;
            if pi1_power_of(g, img, root, window).is_none() {
                continue 'cand;
            }
        }
        return Some((v.clone(), root.clone()));
    }
    None
}

/// The abelian vertex already carrying the class, if any: an abelian
/// endpoint of a class end whose group contains every class image.
fn class_home(g: &GraphOfGroups, class: &[EdgeEnd]) -> Option<VertexId> {
    let mut seen = BTreeSet::new();
    for end in class {
        let v = g.edge(&end.0).endpoint(end.1).clone();
        if g.vertex(&v).is_abelian_class() {
            seen.insert(v);
        }
    }
    seen.into_iter().next()
}

fn fresh_vertex_id(g: &GraphOfGroups) -> VertexId {
    for n in 1.. {
        let id = vid(&format!("z{n}"));
        if !g.vertices().contains_key(&id) {
            return id;
        }
    }
    unreachable!()
}

fn fresh_edge_id(g: &GraphOfGroups) -> EdgeId {
    for n in 1.. {
        let id = eid(&format!("w{n}"));
        if !g.edges().contains_key(&id) {
            return id;
        }
    }
    unreachable!()
}

fn identity_witness(source: &GraphOfGroups, target: &GraphOfGroups) -> GroupMap {
    let sp = source.fundamental_presentation();
    let tp = target.fundamental_presentation();
    GroupMap {
        forward: sp.gens.iter().map(|g| (g.clone(), Word::gen(g.clone()))).collect(),
        backward: Some(tp.gens.iter().map(|g| (g.clone(), Word::gen(g.clone()))).collect()),
        source: sp,
        target: tp,
        status: MapStatus::Unchecked,
    }
}

/// Inserts an elementary vertex `z = ⟨m⟩` for the class root `r` found at
/// vertex `v`, joined to `v` by a full tree edge.
fn insert_home(g: &GraphOfGroups, v: &VertexId, root: &Word) -> (GraphOfGroups, GroupMap, VertexId) {
    let mut out = g.clone();
    let z = fresh_vertex_id(&out);
    let m = sym(&format!("{z}_m1"));
    out.add_vertex(z.clone(), GroupHandle::abelian_named(vec![m.clone()]));
    let f = fresh_edge_id(&out);
    out.add_edge(
        f,
        Edge {
            from: z.clone(),
            to: v.clone(),
            rank: 1,
            alpha: vec![Word::gen(m.clone())],
            omega: vec![root.clone()],
            tree: true,
            silver: false,
        },
    );
    let mut map = identity_witness(g, &out);
    map.backward.as_mut().unwrap().insert(m, root.clone());
    (out, map, z)
}

/// The cycle rewrite for a loop whose stable letter commutes with the edge
/// images: the maximal abelian subgroup picks up the stable letter as a
/// new rank, the loop becomes a tree edge to the enlarged elementary
/// vertex.
fn extend_rank(g: &GraphOfGroups, loop_edge: &EdgeId) -> Result<(GraphOfGroups, GroupMap), GogError> {
    let e = g.edge(loop_edge).clone();
    let t = Word::gen(g.stable_sym(loop_edge));
    let v = e.from.clone();
    let handle = g.vertex(&v).clone();
    let mut out = g.clone();
    out.remove_edge(loop_edge);
    if handle.is_abelian_class() {
        // bump the abelian vertex's rank in place
        let n = handle.rank();
        let new_gen = sym(&format!("{v}_m{}", n + 1));
        let mut gens = handle.gens().to_vec();
        gens.push(new_gen.clone());
        out.add_vertex(v.clone(), GroupHandle::abelian_named(gens));
        let mut map = identity_witness(g, &out);
        map.forward.insert(g.stable_sym(loop_edge), Word::gen(new_gen.clone()));
        map.backward.as_mut().unwrap().insert(new_gen, t);
        return Ok((out, map));
    }
    // non-abelian vertex: the centralizer root r and the stable letter
    // span a rank-2 elementary vertex z; the loop's images turn into one
    // tree edge from z
    let root = match handle.centralizer(&e.alpha[0]) {
        Centralizer::Cyclic { root, .. } => root,
        Centralizer::WholeGroup => {
            return Err(GogError::Internal("abelian case handled above".into()))
        }
        Centralizer::Unknown(r) => return Err(GogError::Abstained(r)),
    };
    match word_problem::is_trivial(g, &Word::commutator(&t, &root)) {
        Tri::Trivial => {}
        Tri::NonTrivial => {
            return Err(GogError::Unsupported(format!(
                "stable letter commutes with the edge image but not with its root {root}; \
                 the input is outside the supported class"
            )))
        }
        Tri::Unknown(r) => return Err(GogError::Abstained(r)),
    }
    let z = fresh_vertex_id(&out);
    let m1 = sym(&format!("{z}_m1"));
    let m2 = sym(&format!("{z}_m2"));
    out.add_vertex(z.clone(), GroupHandle::abelian_named(vec![m1.clone(), m2.clone()]));
    let k = crate::free::power_of(&e.alpha[0], &root).unwrap_or(1);
    let f = fresh_edge_id(&out);
    out.add_edge(
        f,
        Edge {
            from: z.clone(),
            to: v.clone(),
            rank: 1,
            alpha: vec![Word::gen(m1.clone())],
            omega: vec![root.clone()],
            tree: true,
            silver: false,
        },
    );
    let _ = k;
    let mut map = identity_witness(g, &out);
    map.forward.insert(g.stable_sym(loop_edge), Word::gen(m2.clone()));
    let back = map.backward.as_mut().unwrap();
    back.insert(m1, root);
    back.insert(m2, t);
    Ok((out, map))
}

/// Moves one end of an edge onto the home vertex `z`, rewriting its images
/// through the word problem. The rewrite only goes through when the result
/// is a valid splitting in which the edge's old relators still hold (the
/// membership derivation may have routed through the edge itself, in which
/// case the move would lose a relation and is refused here).
fn slide_end_to(
    g: &GraphOfGroups,
    e: &EdgeId,
    end: End,
    z: &VertexId,
    notes: &mut Vec<String>,
) -> Option<GraphOfGroups> {
    let edge = g.edge(e).clone();
    let mut new_images = Vec::new();
    for w in edge.images(end) {
        match word_problem::vertex_membership(g, w, z) {
            Membership::In(elem) => new_images.push(elem),
            Membership::Out => {
                notes.push(format!(
                    "edge {e}: image {w} does not lie in the elementary vertex {z}; not slid"
                ));
                return None;
            }
            Membership::Unknown(r) => {
                notes.push(format!("edge {e}: slide abstained: {r}"));
                return None;
            }
        }
    }
    let mut out = g.clone();
    {
        let em = out.edge_mut(e);
        match end {
            End::Alpha => {
                em.from = z.clone();
                em.alpha = new_images;
            }
            End::Omega => {
                em.to = z.clone();
                em.omega = new_images;
            }
        }
    }
    if out.validate().is_err() {
        return None;
    }
    // the old identification must still hold in the rewritten graph
    let t = if edge.tree { None } else { Some(Word::gen(g.stable_sym(e))) };
    for (a, o) in edge.alpha.iter().zip(&edge.omega) {
        let relator = match &t {
            None => a.mul(&o.inverse()),
            Some(t) => a.mul(t).mul(&o.inverse()).mul(&t.inverse()),
        };
        if !word_problem::is_trivial(&out, &relator).is_trivial() {
            return None;
        }
    }
    Some(out)
}

/// Removes a tree edge whose identification relator is already implied by
/// the remaining graph (Tietze-redundant multi-edge after slides).
fn drop_redundant_tree_edge(g: &GraphOfGroups) -> Option<(GraphOfGroups, EdgeId)> {
    let ids: Vec<EdgeId> = g.edges().keys().cloned().collect();
    for id in &ids {
        let e = g.edge(id);
        if !e.tree {
            continue;
        }
        // a parallel companion in the tree makes a cycle
        let parallel = ids.iter().any(|other| {
            if other == id {
                return false;
            }
            let o = g.edge(other);
            o.tree
                && ((o.from == e.from && o.to == e.to) || (o.from == e.to && o.to == e.from))
        });
        if !parallel {
            continue;
        }
        let mut out = g.clone();
        out.remove_edge(id);
        if out.validate().is_err() {
            continue;
        }
        // the dropped relators must still hold
        let ok = e.alpha.iter().zip(&e.omega).all(|(a, o)| {
            word_problem::is_trivial(&out, &a.mul(&o.inverse())).is_trivial()
        });
        if ok {
            return Some((out, id.clone()));
        }
    }
    None
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct NormalizeReport {
    pub classes: Vec<AbelianSubgraph>,
    pub steps: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct NormalizeOutcome {
    pub graph: GraphOfGroups,
    /// Verified isomorphism from the input's fundamental presentation to
    /// the output's.
    pub witness: GroupMap,
    pub report: NormalizeReport,
}

/// The per-class view used by reports: classes of edges (by α-image) with
/// their homes and silver subsets.
pub fn collect_abelian_subgraphs(g: &GraphOfGroups) -> (Vec<AbelianSubgraph>, Vec<String>) {
    let mut notes = Vec::new();
    let classes = end_classes(g, &mut notes);
    let mut out = Vec::new();
    for class in &classes {
        let edges: BTreeSet<EdgeId> = class
            .iter()
            .filter(|(_, end)| *end == End::Alpha)
            .map(|(e, _)| e.clone())
            .collect();
        if edges.is_empty() {
            continue;
        }
        let silver: BTreeSet<EdgeId> =
            edges.iter().filter(|e| g.edge(e).silver).cloned().collect();
        let description = match class_home(g, class) {
            Some(v) => format!("abelian vertex {v}"),
            None => {
                let mut tmp = Vec::new();
                match class_root(g, class, &mut tmp) {
                    Some((v, r)) => format!("centralizer of {r} at {v}"),
                    None => "undetermined".to_string(),
                }
            }
        };
        out.push(AbelianSubgraph { description, home: class_home(g, class), edges, silver });
    }
    (out, notes)
}

/// One rewriting pass; returns the changed graph, the step witness, and a
/// step description, or `None` when the graph is already normal.
fn normalize_step(
    g: &GraphOfGroups,
    notes: &mut Vec<String>,
) -> Result<Option<(GraphOfGroups, GroupMap, String)>, GogError> {
    // 0. canonical orientation: elementary vertices sit at the α-end; ties
    // (two elementary endpoints) break by vertex id
    for (id, e) in g.edges() {
        let (from_elem, to_elem) =
            (g.vertex(&e.from).is_abelian_class(), g.vertex(&e.to).is_abelian_class());
        let flip = match (from_elem, to_elem) {
            (false, true) => true,
            (true, true) | (false, false) => e.from > e.to,
            (true, false) => false,
        };
        if !flip {
            continue;
        }
        let mut out = g.clone();
        {
            let em = out.edge_mut(id);
            std::mem::swap(&mut em.from, &mut em.to);
            std::mem::swap(&mut em.alpha, &mut em.omega);
        }
        let mut map = identity_witness(g, &out);
        if !e.tree {
            let t = g.stable_sym(id);
            map.forward.insert(t.clone(), Word::gen(t.clone()).inverse());
            map.backward.as_mut().unwrap().insert(t.clone(), Word::gen(t).inverse());
        }
        return Ok(Some((out, map, format!("re-oriented edge {id}"))));
    }
    // 1. cycle rewrite: a loop whose stable letter centralizes the images
    for (id, e) in g.edges() {
        if e.tree || !e.is_loop() || e.rank == 0 {
            continue;
        }
        let t = Word::gen(g.stable_sym(id));
        let commutes = e.alpha.iter().chain(&e.omega).all(|w| {
            word_problem::is_trivial(g, &Word::commutator(&t, w)).is_trivial()
        });
        if commutes {
            let (out, map) = extend_rank(g, id)?;
            return Ok(Some((out, map, format!("absorbed loop {id} into an elementary vertex"))));
        }
    }
    // recompute the end classes on the current graph
    let classes = end_classes(g, notes);
    // 2. every class needs an elementary home
    for class in &classes {
        if class_home(g, class).is_some() {
            continue;
        }
        let Some((v, root)) = class_root(g, class, notes) else {
            notes.push("class without a determinable root was left untouched".into());
            continue;
        };
        let (out, map, z) = insert_home(g, &v, &root);
        return Ok(Some((out, map, format!("inserted elementary vertex {z} for root {root}"))));
    }
    // 3. slide ends onto their homes; a tree edge only ever needs one end
    // at the elementary vertex, so once either end touches it, leave it
    for class in &classes {
        let Some(z) = class_home(g, class) else { continue };
        for (e, end) in class {
            let edge = g.edge(e);
            if *edge.endpoint(*end) == z {
                continue;
            }
            if edge.tree && *edge.endpoint(end.other()) == z {
                continue;
            }
            if let Some(out) = slide_end_to(g, e, *end, &z, notes) {
                let map = identity_witness(g, &out);
                return Ok(Some((out, map, format!("slid {end:?}-end of {e} to {z}"))));
            }
        }
    }
    // 4. silver flags: non-tree edges between two elementary vertices with
    // full images on both sides
    for (id, e) in g.edges() {
        if e.tree || e.silver || e.rank == 0 {
            continue;
        }
        let elementary_ends = g.vertex(&e.from).is_abelian_class() && g.vertex(&e.to).is_abelian_class();
        if !elementary_ends {
            continue;
        }
        let full = g.image_is_whole_vertex(id, End::Alpha).is_trivial()
            && g.image_is_whole_vertex(id, End::Omega).is_trivial();
        if full {
            let mut out = g.clone();
            out.edge_mut(id).silver = true;
            let map = identity_witness(g, &out);
            return Ok(Some((out, map, format!("marked {id} silver"))));
        } else {
            notes.push(format!(
                "edge {id} joins two elementary vertices without full images; \
                 the input is outside the supported class"
            ));
        }
    }
    // 5. redundant parallel tree edges left over from slides
    if let Some((out, dropped)) = drop_redundant_tree_edge(g) {
        let map = identity_witness(g, &out);
        return Ok(Some((out, map, format!("dropped redundant tree edge {dropped}"))));
    }
    // 6. semi-reducedness: collapse tree edges that fill an endpoint badly
    for (id, e) in g.edges() {
        if !e.tree {
            continue;
        }
        for end in [End::Alpha, End::Omega] {
            if !g.image_is_whole_vertex(id, end).is_trivial() {
                continue;
            }
            let v = e.endpoint(end);
            let both_full = g.image_is_whole_vertex(id, end.other()).is_trivial();
            if g.valency(v) == 1 || both_full {
                let outcome = apply_move(g, &Move::Collapse { edge: id.clone() })?;
                notes.extend(outcome.notes);
                return Ok(Some((
                    outcome.graph,
                    outcome.witness,
                    format!("collapsed full tree edge {id}"),
                )));
            }
        }
    }
    Ok(None)
}

/// Rewrites a cycle-carrying class into constellation form. This is the
/// cycle-specific slice of [`normalize`]: the loop absorption when the
/// stable letter centralizes the images, and the double slide onto the two
/// elementary centers otherwise.
pub fn cycle_to_constellation(
    g: &GraphOfGroups,
    class: &AbelianSubgraph,
) -> Result<(GraphOfGroups, GroupMap), GogError> {
    let cycle_edge = class
        .edges
        .iter()
        .find(|e| !g.edge(e).tree)
        .ok_or_else(|| GogError::MovePrecondition("class contains no cycle".into()))?;
    let mut out = g.clone();
    let mut witness = identity_witness(g, g);
    let mut notes = Vec::new();
    for _ in 0..32 {
        match normalize_step(&out, &mut notes)? {
            Some((next, step_map, _)) => {
                witness = witness.compose(&step_map)?;
                out = next;
            }
            None => break,
        }
        if !out.edges().contains_key(cycle_edge) || out.edge(cycle_edge).silver {
            break;
        }
    }
    let (witness, vnotes) = word_problem::verify_isomorphism(&witness, g, &out);
    if witness.status != MapStatus::VerifiedIso {
        return Err(GogError::Internal(format!(
            "constellation witness failed: {}",
            vnotes.join("; ")
        )));
    }
    Ok((out, witness))
}

/// Full normalization. Idempotent up to structural equality; the witness
/// is verified before returning.
pub fn normalize(g: &GraphOfGroups, _bounds: &Bounds) -> Result<NormalizeOutcome, GogError> {
    g.validate()?;
    let mut out = g.clone();
    let mut witness = identity_witness(g, g);
    let mut report = NormalizeReport::default();
    for round in 0.. {
        if round > 64 {
            return Err(GogError::Internal("normalization did not stabilize".into()));
        }
        match normalize_step(&out, &mut report.notes)? {
            Some((next, step_map, step)) => {
                witness = witness.compose(&step_map)?;
                report.steps.push(step);
                out = next;
            }
            None => break,
        }
    }
    out.validate()?;
    let (classes, class_notes) = collect_abelian_subgraphs(&out);
    report.classes = classes;
    report.notes.extend(class_notes);
    let (witness, vnotes) = word_problem::verify_isomorphism(&witness, g, &out);
    if witness.status != MapStatus::VerifiedIso {
        report.notes.extend(vnotes.clone());
        return Err(GogError::Internal(format!(
            "normalization witness failed verification: {}",
            vnotes.join("; ")
        )));
    }
    Ok(NormalizeOutcome { graph: out, witness, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::*;
    use crate::predicates::{predicates, ClassD};

    fn bounds() -> Bounds {
        Bounds { radius: 2, rep_len: 4, conj_len: 6, ..Bounds::default() }
    }

    #[test]
    fn classes_of_star_share_one_subgraph() {
        let g = star_abelian_center();
        let (classes, notes) = collect_abelian_subgraphs(&g);
        assert!(notes.is_empty());
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].home, Some(vid("m")));
    }

    #[test]
    fn double_forms_a_singleton_class() {
        let g = double_xy_uv();
        let (classes, _) = collect_abelian_subgraphs(&g);
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].edges.len(), 1);
        assert!(classes[0].home.is_none());
        assert!(classes[0].description.contains("centralizer"));
    }

    #[test]
    fn separate_cyclic_subgroups_make_separate_classes() {
        // two stars with non-commuting centers share no class
        let mut g = GraphOfGroups::new();
        g.add_vertex(vid("a"), GroupHandle::free_named(vec![sym("x"), sym("y")]));
        g.add_vertex(vid("b"), GroupHandle::free_named(vec![sym("u"), sym("v")]));
        g.add_edge(
            eid("e"),
            Edge {
                from: vid("a"),
                to: vid("b"),
                rank: 1,
                alpha: vec![crate::word::word("x^2")],
                omega: vec![crate::word::word("u^2")],
                tree: true,
                silver: false,
            },
        );
        g.add_edge(
            eid("f"),
            Edge {
                from: vid("a"),
                to: vid("b"),
                rank: 1,
                alpha: vec![crate::word::word("y^2")],
                omega: vec![crate::word::word("v^2")],
                tree: false,
                silver: false,
            },
        );
        let (classes, _) = collect_abelian_subgraphs(&g);
        assert_eq!(classes.len(), 2);
    }

    #[test]
    fn normalize_double_inserts_elementary_center() {
        let g = double_xy_uv();
        let out = normalize(&g, &bounds()).unwrap();
        assert_eq!(out.graph.vertices().len(), 3);
        let p = predicates(&out.graph, &bounds());
        assert!(p.is_semi_reduced, "{:?}", p.witnesses);
        assert!(p.is_bipartite_elementary, "{:?}", p.witnesses);
        assert!(matches!(p.in_class_d, ClassD::Yes));
        assert_eq!(out.witness.status, MapStatus::VerifiedIso);
    }

    #[test]
    fn normalize_is_idempotent() {
        let g = double_xy_uv();
        let once = normalize(&g, &bounds()).unwrap();
        let twice = normalize(&once.graph, &bounds()).unwrap();
        assert_eq!(once.graph, twice.graph);
    }

    #[test]
    fn already_normal_star_unchanged() {
        let g = normalized_double();
        let out = normalize(&g, &bounds()).unwrap();
        assert_eq!(out.graph, g);
    }

    #[test]
    fn centralizer_extension_becomes_rank_two_vertex() {
        // ⟨x, y, t | [t,x]⟩: the loop is absorbed into a Z² vertex
        let g = centralizer_extension();
        let out = normalize(&g, &bounds()).unwrap();
        assert_eq!(out.witness.status, MapStatus::VerifiedIso);
        let abelian: Vec<_> = out
            .graph
            .vertices()
            .iter()
            .filter(|(_, h)| h.is_abelian_class())
            .collect();
        assert_eq!(abelian.len(), 1);
        assert_eq!(abelian[0].1.rank(), 2);
        let p = predicates(&out.graph, &bounds());
        assert!(p.is_bipartite_elementary, "{:?}", p.witnesses);
        assert!(p.is_semi_reduced, "{:?}", p.witnesses);
    }

    #[test]
    fn z2_hnn_collapses_to_a_point() {
        let g = hnn_z2();
        let out = normalize(&g, &bounds()).unwrap();
        assert_eq!(out.graph.vertices().len(), 1);
        assert_eq!(out.graph.edges().len(), 0);
        let (_, h) = out.graph.vertices().iter().next().unwrap();
        assert!(h.is_abelian_class());
        assert_eq!(h.rank(), 2);
        assert_eq!(out.witness.status, MapStatus::VerifiedIso);
    }

    #[test]
    fn sliding_gathers_edges_on_one_center() {
        // two edges into one abelian vertex, both images inside it
        let mut g = star_abelian_center();
        g.add_vertex(vid("b"), GroupHandle::free_named(vec![sym("u"), sym("v")]));
        g.add_edge(
            eid("f"),
            Edge {
                from: vid("a"),
                to: vid("b"),
                rank: 1,
                alpha: vec![crate::word::word("x^2 y^3")],
                omega: vec![crate::word::word("u^3")],
                tree: true,
                silver: false,
            },
        );
        let out = normalize(&g, &bounds()).unwrap();
        let p = predicates(&out.graph, &bounds());
        assert!(p.is_bipartite_elementary, "{:?}", p.witnesses);
        // the slid edge now leaves the abelian center
        assert_eq!(out.graph.edge(&eid("f")).from, vid("m"));
        assert_eq!(out.witness.status, MapStatus::VerifiedIso);
    }

    #[test]
    fn acyclic_class_rejected_by_cycle_rewrite() {
        let g = double_xy_uv();
        let (classes, _) = collect_abelian_subgraphs(&g);
        let err = cycle_to_constellation(&g, &classes[0]).unwrap_err();
        assert!(matches!(err, GogError::MovePrecondition(_)));
    }

    #[test]
    fn m_cycle_with_full_edge_groups_gets_silver_edge() {
        // two stars with Z centers joined leaf-to-leaf, plus an HNN edge
        // identifying the two centers: the A = M branch
        let mut g = GraphOfGroups::new();
        g.add_vertex(vid("y"), GroupHandle::abelian_named(vec![sym("m")]));
        g.add_vertex(vid("z"), GroupHandle::abelian_named(vec![sym("n")]));
        g.add_vertex(vid("a"), GroupHandle::free_named(vec![sym("x1"), sym("x2")]));
        g.add_edge(
            eid("e1"),
            Edge {
                from: vid("y"),
                to: vid("a"),
                rank: 1,
                alpha: vec![crate::word::word("m")],
                omega: vec![crate::word::word("x1^2")],
                tree: true,
                silver: false,
            },
        );
        g.add_edge(
            eid("e2"),
            Edge {
                from: vid("z"),
                to: vid("a"),
                rank: 1,
                alpha: vec![crate::word::word("n")],
                omega: vec![crate::word::word("x2^2")],
                tree: true,
                silver: false,
            },
        );
        // HNN edge between the two maximal abelian centers
        g.add_edge(
            eid("s"),
            Edge {
                from: vid("y"),
                to: vid("z"),
                rank: 1,
                alpha: vec![crate::word::word("m")],
                omega: vec![crate::word::word("n")],
                tree: false,
                silver: false,
            },
        );
        assert!(g.validate().is_ok());
        let out = normalize(&g, &bounds()).unwrap();
        assert!(out.graph.edge(&eid("s")).silver);
        let p = predicates(&out.graph, &bounds());
        assert!(p.is_bipartite_elementary, "{:?}", p.witnesses);
        assert_eq!(out.witness.status, MapStatus::VerifiedIso);
    }
}
