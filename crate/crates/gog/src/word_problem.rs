//! The word problem for fundamental groups of graphs of groups: words are
//! rewritten into loop form over the maximal tree and reduced by pinch
//! moves; a reduced loop with crossings left is nontrivial. Exactness is
//! inherited from the vertex backends; abstentions stay visible.

use crate::error::GogError;
use crate::graph::{End, EdgeId, GraphOfGroups, VertexId};
use crate::group::{GroupClass, Strategy, Tri};
use crate::presentation::{GroupMap, MapStatus};
use crate::word::Word;
use crate::{free, stallings::SubgroupGraph};

/// One edge crossing of a loop; `forward` runs from `i(e)` to `τ(e)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub edge: EdgeId,
    pub forward: bool,
}

impl Crossing {
    fn inverse_of(&self, other: &Crossing) -> bool {
        self.edge == other.edge && self.forward != other.forward
    }
}

/// A loop at `base` in normal-form shape: an element of the base vertex
/// group followed by alternating crossings and vertex elements. Every
/// element sits in the group of the vertex reached by the crossings so far.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopWord {
    pub base: VertexId,
    pub head: Word,
    pub tail: Vec<(Crossing, Word)>,
}

impl LoopWord {
    pub fn crossings(&self) -> usize {
        self.tail.len()
    }

    /// The group element the loop spells, as a word over the fundamental
    /// generators.
    pub fn to_word(&self, g: &GraphOfGroups) -> Word {
        let mut w = self.head.clone();
        for (c, elem) in &self.tail {
            w = w.mul(&crossing_letter(g, c)).mul(elem);
        }
        w
    }
}

fn crossing_letter(g: &GraphOfGroups, c: &Crossing) -> Word {
    if g.edge(&c.edge).tree {
        Word::identity()
    } else {
        let t = Word::gen(g.stable_sym(&c.edge));
        if c.forward {
            t
        } else {
            t.inverse()
        }
    }
}

fn crossing_target(g: &GraphOfGroups, c: &Crossing) -> VertexId {
    let e = g.edge(&c.edge);
    if c.forward {
        e.to.clone()
    } else {
        e.from.clone()
    }
}

/// Membership of a vertex element in an edge-group image.
#[derive(Clone, Debug, PartialEq)]
pub enum Mem {
    /// Coordinates over the edge-group basis.
    In(Vec<i64>),
    Out,
    Unknown(String),
}

/// Membership of a vertex element in the image of one edge end, with
/// coordinates over the edge basis. Dispatches on the endpoint class.
pub fn image_membership(g: &GraphOfGroups, e: &EdgeId, end: End, elem: &Word) -> Mem {
    let edge = g.edge(e);
    let target = g.vertex(edge.endpoint(end));
    let images = edge.images(end);
    if edge.rank == 0 {
        return match target.is_trivial_elem(elem) {
            Tri::Trivial => Mem::In(vec![]),
            Tri::NonTrivial => Mem::Out,
            Tri::Unknown(r) => Mem::Unknown(r),
        };
    }
    match target.class() {
        GroupClass::Abelian => abelian_images_membership(target, images, elem),
        GroupClass::Free => match free::power_of(elem, &images[0]) {
            Some(k) => Mem::In(vec![k]),
            None => Mem::Out,
        },
        GroupClass::Surface(sig) => {
            let c = &images[0];
            if elem.is_empty() {
                return Mem::In(vec![0]);
            }
            let (_, core) = c.cyclic_reduce();
            let window = (elem.len() as i64) / (core.len().max(1) as i64) + 2;
            for k in -window..=window {
                let test = elem.mul(&c.pow(-k));
                match sig.is_trivial(target.gens(), &test) {
                    Ok(true) => return Mem::In(vec![k]),
                    Ok(false) => {}
                    Err(err) => return Mem::Unknown(err.to_string()),
                }
            }
            Mem::Out
        }
        GroupClass::Rigid(data) => match &data.strategy {
            Strategy::Free => free_images_membership(images, elem),
            Strategy::Abelian => abelian_images_membership(target, images, elem),
            _ => bounded_membership(target, images, elem, 6),
        },
    }
}

/// Coordinates over the image rows themselves (not a normalized basis),
/// so the pinch translation can pair them with the other end.
fn abelian_images_membership(
    target: &crate::group::GroupHandle,
    images: &[Word],
    elem: &Word,
) -> Mem {
    let rows: Vec<Vec<i64>> = images.iter().map(|w| target.word_to_vector(w)).collect();
    let mat = crate::matrix::Mat::from_rows(rows);
    match mat.solve_left(&target.word_to_vector(elem)) {
        Some(c) => Mem::In(c),
        None => Mem::Out,
    }
}

/// Membership in `⟨images⟩` for pairwise commuting words in a free group:
/// commuting free elements share a root, so this is exponent arithmetic.
fn free_images_membership(images: &[Word], elem: &Word) -> Mem {
    if images.len() == 1 {
        return match free::power_of(elem, &images[0]) {
            Some(k) => Mem::In(vec![k]),
            None => Mem::Out,
        };
    }
    let (rho, _) = free::root(&images[0]);
    let exps: Option<Vec<i64>> = images.iter().map(|w| free::power_of(w, &rho)).collect();
    let Some(exps) = exps else {
        return Mem::Unknown("commuting images without a common root".into());
    };
    let Some(m) = free::power_of(elem, &rho) else {
        return Mem::Out;
    };
    match bezout_combination(&exps, m) {
        Some(coords) => Mem::In(coords),
        None => Mem::Out,
    }
}

/// Integer solution of Σ c_i e_i = m via an extended gcd chain.
fn bezout_combination(exps: &[i64], m: i64) -> Option<Vec<i64>> {
    fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
        if b == 0 {
            (a.abs(), a.signum(), 0)
        } else {
            let (g, x, y) = ext_gcd(b, a % b);
            (g, y, x - (a / b) * y)
        }
    }
    let mut g = 0i64;
    let mut coeffs: Vec<i64> = Vec::new();
    for &e in exps {
        let (ng, x, y) = ext_gcd(g, e);
        for c in coeffs.iter_mut() {
            *c *= x;
        }
        coeffs.push(y);
        g = ng;
    }
    if g == 0 {
        return if m == 0 { Some(vec![0; exps.len()]) } else { None };
    }
    if m % g != 0 {
        return None;
    }
    let scale = m / g;
    Some(coeffs.into_iter().map(|c| c * scale).collect())
}

/// Box search through an inexact backend; a hit is exact, exhaustion is an
/// abstention, never a refusal.
fn bounded_membership(
    target: &crate::group::GroupHandle,
    images: &[Word],
    elem: &Word,
    bound: i64,
) -> Mem {
    let mut coords = vec![0i64; images.len()];
    loop {
        let mut candidate = Word::identity();
        for (w, &c) in images.iter().zip(&coords) {
            candidate = candidate.mul(&w.pow(c));
        }
        match target.is_trivial_elem(&elem.mul(&candidate.inverse())) {
            Tri::Trivial => return Mem::In(coords),
            Tri::Unknown(r) => return Mem::Unknown(r),
            Tri::NonTrivial => {}
        }
        // advance the coefficient box
        let mut i = 0;
        loop {
            if i == coords.len() {
                return Mem::Unknown(format!(
                    "membership box search exhausted at bound {bound} for {elem}"
                ));
            }
            coords[i] += 1;
            if coords[i] <= bound {
                break;
            }
            coords[i] = -bound;
            i += 1;
        }
    }
}

/// Canonical representative of `elem · image`, used to separate cosets
/// while exploring covering trees. `Exact` keys separate cosets precisely;
/// `Bounded` keys are best-effort and flagged by callers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CosetRep {
    Exact(Word),
    Bounded(Word),
}

impl CosetRep {
    pub fn word(&self) -> &Word {
        match self {
            CosetRep::Exact(w) | CosetRep::Bounded(w) => w,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, CosetRep::Exact(_))
    }
}

pub fn coset_canonical(g: &GraphOfGroups, e: &EdgeId, end: End, elem: &Word) -> CosetRep {
    let edge = g.edge(e);
    let target = g.vertex(edge.endpoint(end));
    let images = edge.images(end);
    if edge.rank == 0 {
        return match target.class() {
            GroupClass::Abelian | GroupClass::Free => CosetRep::Exact(target.normal_form(elem)),
            _ => CosetRep::Bounded(elem.clone()),
        };
    }
    match target.class() {
        GroupClass::Abelian => {
            let lat = g.image_lattice(e, end).expect("abelian endpoint");
            let residue = lat.coset_residue(&target.word_to_vector(elem));
            CosetRep::Exact(target.vector_to_word(&residue))
        }
        GroupClass::Free => {
            let graph = SubgroupGraph::new(images);
            let key = graph.coset_key(elem);
            CosetRep::Exact(graph.coset_rep(&key))
        }
        GroupClass::Rigid(data) if matches!(data.strategy, Strategy::Free) => {
            let graph = SubgroupGraph::new(images);
            let key = graph.coset_key(elem);
            CosetRep::Exact(graph.coset_rep(&key))
        }
        _ => {
            // minimize elem · c^k over a window; canonical only in-window
            let c = &images[0];
            let (_, core) = c.cyclic_reduce();
            let window = (elem.len() as i64) / (core.len().max(1) as i64) + 2;
            let mut best = elem.clone();
            for k in -window..=window {
                let cand = elem.mul(&c.pow(k));
                if (cand.len(), cand.display()) < (best.len(), best.display()) {
                    best = cand;
                }
            }
            CosetRep::Bounded(best)
        }
    }
}

/// Rewrites a word over the fundamental generators into loop form at
/// `base`, inserting tree geodesics between vertex hops.
pub fn loop_of_word(g: &GraphOfGroups, w: &Word, base: &VertexId) -> Result<LoopWord, GogError> {
    let mut lp = LoopWord { base: base.clone(), head: Word::identity(), tail: Vec::new() };
    let mut position = base.clone();
    let extend_to = |lp: &mut LoopWord, position: &mut VertexId, target: &VertexId| {
        for (eid, end) in g.tree_path(position, target) {
            lp.tail.push((Crossing { edge: eid, forward: end == End::Alpha }, Word::identity()));
        }
        *position = target.clone();
    };
    for letter in w.letters() {
        let single = Word::reduce([letter.clone()]);
        if let Some(v) = g.generator_vertex(&letter.sym) {
            extend_to(&mut lp, &mut position, v);
            let handle = g.vertex(v);
            match lp.tail.last_mut() {
                Some((_, elem)) => *elem = handle.normal_form(&elem.mul(&single)),
                None => lp.head = handle.normal_form(&lp.head.mul(&single)),
            }
        } else if let Some(eid) = g.stable_edge(&letter.sym) {
            let e = g.edge(&eid);
            if !letter.inv {
                extend_to(&mut lp, &mut position, &e.from.clone());
                lp.tail.push((Crossing { edge: eid, forward: true }, Word::identity()));
                position = e.to.clone();
            } else {
                extend_to(&mut lp, &mut position, &e.to.clone());
                lp.tail.push((Crossing { edge: eid, forward: false }, Word::identity()));
                position = e.from.clone();
            }
        } else {
            return Err(GogError::UnknownGenerator(letter.sym.to_string()));
        }
    }
    extend_to(&mut lp, &mut position, base);
    Ok(lp)
}

/// Applies pinch moves until none fire. Returns the reduced loop and the
/// membership abstentions of the final scan (nonempty means the loop may
/// pinch further but a backend could not decide).
pub fn reduce_loop(g: &GraphOfGroups, mut lp: LoopWord) -> (LoopWord, Vec<String>) {
    'outer: loop {
        let mut unknowns = Vec::new();
        for i in 0..lp.tail.len().saturating_sub(1) {
            let (c1, _) = &lp.tail[i];
            let (c2, _) = &lp.tail[i + 1];
            if !c1.inverse_of(c2) {
                continue;
            }
            // the element between the crossings lives at c1's target
            let elem = lp.tail[i].1.clone();
            let (mem_end, out_end) =
                if c1.forward { (End::Omega, End::Alpha) } else { (End::Alpha, End::Omega) };
            match image_membership(g, &c1.edge.clone(), mem_end, &elem) {
                Mem::In(coords) => {
                    let edge = g.edge(&c1.edge);
                    let mut replacement = Word::identity();
                    for (w, &c) in edge.images(out_end).iter().zip(&coords) {
                        replacement = replacement.mul(&w.pow(c));
                    }
                    let after = lp.tail[i + 1].1.clone();
                    lp.tail.drain(i..=i + 1);
                    let handle_at = |v: &VertexId, w: &Word| g.vertex(v).normal_form(w);
                    if i == 0 {
                        let v = lp.base.clone();
                        lp.head = handle_at(&v, &lp.head.mul(&replacement).mul(&after));
                    } else {
                        let v = crossing_target(g, &lp.tail[i - 1].0);
                        let prev = lp.tail[i - 1].1.clone();
                        lp.tail[i - 1].1 = handle_at(&v, &prev.mul(&replacement).mul(&after));
                    }
                    continue 'outer;
                }
                Mem::Out => {}
                Mem::Unknown(r) => unknowns.push(r),
            }
        }
        return (lp, unknowns);
    }
}

/// Exact-where-possible triviality of a word in the fundamental group.
pub fn is_trivial(g: &GraphOfGroups, w: &Word) -> Tri {
    let Some(base) = g.vertices().keys().next().cloned() else {
        return Tri::Unknown("empty graph".into());
    };
    let lp = match loop_of_word(g, w, &base) {
        Ok(lp) => lp,
        Err(e) => return Tri::Unknown(e.to_string()),
    };
    let (reduced, unknowns) = reduce_loop(g, lp);
    if reduced.tail.is_empty() {
        return g.vertex(&reduced.base).is_trivial_elem(&reduced.head);
    }
    if unknowns.is_empty() {
        Tri::NonTrivial
    } else {
        Tri::Unknown(format!("unresolved pinch sites: {}", unknowns.join("; ")))
    }
}

/// Membership of `w` in the vertex group `v`, with the element rewritten
/// into the vertex group on success.
#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    In(Word),
    Out,
    Unknown(String),
}

pub fn vertex_membership(g: &GraphOfGroups, w: &Word, v: &VertexId) -> Membership {
    let lp = match loop_of_word(g, w, v) {
        Ok(lp) => lp,
        Err(e) => return Membership::Unknown(e.to_string()),
    };
    let (reduced, unknowns) = reduce_loop(g, lp);
    if reduced.tail.is_empty() {
        return Membership::In(reduced.head);
    }
    if unknowns.is_empty() {
        Membership::Out
    } else {
        Membership::Unknown(unknowns.join("; "))
    }
}

/// Conjugates the loop into a cyclically reduced core. Returns `(c, core)`
/// with `w = c · core · c⁻¹` as group elements. An empty core tail means
/// `w` is elliptic: it fixes the vertex `core.base` moved by `c`.
pub fn cyclic_core(g: &GraphOfGroups, w: &Word) -> Result<(Word, LoopWord), GogError> {
    let base = g
        .vertices()
        .keys()
        .next()
        .cloned()
        .ok_or_else(|| GogError::validation("empty graph"))?;
    let lp = loop_of_word(g, w, &base)?;
    let (mut lp, _) = reduce_loop(g, lp);
    let mut conj = Word::identity();
    loop {
        if lp.tail.is_empty() {
            return Ok((conj, lp));
        }
        // absorb the head into the conjugator
        if !lp.head.is_empty() {
            conj = conj.mul(&lp.head);
            let head = std::mem::take(&mut lp.head);
            let last = lp.tail.len() - 1;
            let v = crossing_target(g, &lp.tail[last].0);
            lp.tail[last].1 = g.vertex(&v).normal_form(&lp.tail[last].1.mul(&head));
            lp.head = Word::identity();
        }
        if lp.tail.len() == 1 {
            return Ok((conj, lp));
        }
        let first = lp.tail[0].0.clone();
        let last_idx = lp.tail.len() - 1;
        let last = lp.tail[last_idx].0.clone();
        if !first.inverse_of(&last) {
            return Ok((conj, lp));
        }
        // strip the wrap-around pinch: … x_n a_n | x_1 … with a_n at base
        let an = lp.tail[last_idx].1.clone();
        let (mem_end, out_end) =
            if first.forward { (End::Alpha, End::Omega) } else { (End::Omega, End::Alpha) };
        match image_membership(g, &first.edge, mem_end, &an) {
            Mem::In(coords) => {
                let edge = g.edge(&first.edge);
                let mut translated = Word::identity();
                for (w, &c) in edge.images(out_end).iter().zip(&coords) {
                    translated = translated.mul(&w.pow(c));
                }
                conj = conj.mul(&crossing_letter(g, &first));
                let new_base = crossing_target(g, &first);
                let head = lp.tail[0].1.clone();
                let mut tail: Vec<(Crossing, Word)> = lp.tail[1..last_idx].to_vec();
                if let Some(last) = tail.last_mut() {
                    let v = crossing_target(g, &last.0);
                    last.1 = g.vertex(&v).normal_form(&last.1.mul(&translated));
                } else {
                    // two crossings total: head picks up the translation
                    lp.head = g.vertex(&new_base).normal_form(&head.mul(&translated));
                    lp.base = new_base;
                    lp.tail = tail;
                    let (next, _) = reduce_loop(g, lp);
                    lp = next;
                    continue;
                }
                lp = LoopWord { base: new_base, head, tail };
                let (next, _) = reduce_loop(g, lp);
                lp = next;
            }
            Mem::Out => return Ok((conj, lp)),
            Mem::Unknown(r) => return Err(GogError::Abstained(r)),
        }
    }
}

/// Relator check: upgrades to `VerifiedHom` when every source relator maps
/// to a trivial word of the target graph.
pub fn verify_homomorphism(map: &GroupMap, target: &GraphOfGroups) -> (GroupMap, Vec<String>) {
    let mut notes = Vec::new();
    let mut ok = true;
    for r in &map.source.relators {
        match map.apply(r) {
            Ok(image) => match is_trivial(target, &image) {
                Tri::Trivial => {}
                Tri::NonTrivial => {
                    ok = false;
                    notes.push(format!("relator {r} maps to nontrivial {image}"));
                }
                Tri::Unknown(reason) => {
                    ok = false;
                    notes.push(format!("relator {r}: {reason}"));
                }
            },
            Err(e) => {
                ok = false;
                notes.push(e.to_string());
            }
        }
    }
    let mut out = map.clone();
    if ok && out.status == MapStatus::Unchecked {
        out.status = MapStatus::VerifiedHom;
    }
    if !ok {
        out.status = MapStatus::Unchecked;
    }
    (out, notes)
}

/// Full isomorphism verification: both directions are homomorphisms and
/// both composites fix every generator.
pub fn verify_isomorphism(
    map: &GroupMap,
    source: &GraphOfGroups,
    target: &GraphOfGroups,
) -> (GroupMap, Vec<String>) {
    let (mut out, mut notes) = verify_homomorphism(map, target);
    if out.status != MapStatus::VerifiedHom {
        return (out, notes);
    }
    let Some(back) = map.backward.clone() else {
        notes.push("no backward assignment".into());
        return (out, notes);
    };
    let back_map = GroupMap::new(map.target.clone(), map.source.clone(), back);
    let (back_checked, back_notes) = verify_homomorphism(&back_map, source);
    notes.extend(back_notes);
    if back_checked.status != MapStatus::VerifiedHom {
        return (out, notes);
    }
    let mut ok = true;
    for gsym in &map.source.gens {
        let g = Word::gen(gsym.clone());
        let round = back_checked.apply(&map.apply(&g).unwrap_or_default()).unwrap_or_default();
        match is_trivial(source, &round.mul(&g.inverse())) {
            Tri::Trivial => {}
            other => {
                ok = false;
                notes.push(format!("backward∘forward moves {gsym}: {other:?}"));
            }
        }
    }
    for hsym in &map.target.gens {
        let h = Word::gen(hsym.clone());
        let round = map.apply(&back_checked.apply(&h).unwrap_or_default()).unwrap_or_default();
        match is_trivial(target, &round.mul(&h.inverse())) {
            Tri::Trivial => {}
            other => {
                ok = false;
                notes.push(format!("forward∘backward moves {hsym}: {other:?}"));
            }
        }
    }
    if ok {
        out.status = MapStatus::VerifiedIso;
    }
    (out, notes)
}

/// Convenience: `is_trivial` for each of the presentation's own relators.
pub fn relators_vanish(g: &GraphOfGroups) -> Result<(), String> {
    for r in &g.fundamental_presentation().relators {
        match is_trivial(g, r) {
            Tri::Trivial => {}
            other => return Err(format!("relator {r} gave {other:?}")),
        }
    }
    Ok(())
}

/// Syllable view of a reduced loop, for reports.
pub fn describe_loop(lp: &LoopWord) -> String {
    let mut parts = vec![format!("[{} @ {}]", lp.head, lp.base)];
    for (c, elem) in &lp.tail {
        parts.push(format!(
            "--{}{}--> [{}]",
            c.edge,
            if c.forward { "" } else { "ᵒᵖ" },
            elem
        ));
    }
    parts.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::*;
    use crate::word::{sym, word};
    use std::collections::BTreeMap;

    #[test]
    fn edge_relation_is_trivial_in_double() {
        let g = double_xy_uv();
        assert!(is_trivial(&g, &word("x^2 y^3 v^-3 u^-2")).is_trivial());
        assert!(is_trivial(&g, &word("x^2 y^3 u^-2 v^-3")).is_nontrivial());
    }

    #[test]
    fn commutator_across_the_double_survives() {
        let g = double_xy_uv();
        assert!(is_trivial(&g, &word("x u x^-1 u^-1")).is_nontrivial());
    }

    #[test]
    fn hnn_defining_relator_is_trivial() {
        let g = hnn_z2();
        assert!(is_trivial(&g, &word("t_e x t_e^-1 x^-1")).is_trivial());
        assert!(is_trivial(&g, &word("t_e x t_e^-1")).is_nontrivial());
        assert!(is_trivial(&g, &word("t_e^2 x t_e^-2 x^-1")).is_trivial());
    }

    #[test]
    fn all_relators_vanish_on_sample_graphs() {
        for g in [double_xy_uv(), hnn_z2(), star_abelian_center(), theta_graph()] {
            relators_vanish(&g).unwrap();
        }
    }

    #[test]
    fn random_words_times_inverse_vanish() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for g in [double_xy_uv(), star_abelian_center()] {
            let gens = g.fundamental_presentation().gens;
            for _ in 0..60 {
                let mut w = Word::identity();
                for _ in 0..rng.gen_range(0..12) {
                    let s = &gens[rng.gen_range(0..gens.len())];
                    let inv = rng.gen_bool(0.5);
                    w = w.mul(&if inv {
                        Word::gen(s.clone()).inverse()
                    } else {
                        Word::gen(s.clone())
                    });
                }
                assert!(is_trivial(&g, &w.mul(&w.inverse())).is_trivial());
            }
        }
    }

    #[test]
    fn degenerate_graph_word_problem_is_free_reduction() {
        // a single free vertex: triviality coincides with free reduction
        let g = single_free_vertex(2);
        assert!(is_trivial(&g, &word("x1 x2 x2^-1 x1^-1")).is_trivial());
        assert!(is_trivial(&g, &word("x1 x2")).is_nontrivial());
    }

    #[test]
    fn degenerate_abelian_graph_matches_lattice_arithmetic() {
        let g = single_abelian_vertex(2);
        assert!(is_trivial(&g, &word("m1 m2 m1^-1 m2^-1")).is_trivial());
        assert!(is_trivial(&g, &word("m1 m2 m1^-1")).is_nontrivial());
    }

    #[test]
    fn vertex_membership_recovers_elements() {
        let g = double_xy_uv();
        // the amalgamated word u²v³ equals x²y³, an element of vertex a
        match vertex_membership(&g, &word("u^2 v^3"), &crate::graph::vid("a")) {
            Membership::In(w) => assert_eq!(w, word("x^2 y^3")),
            other => panic!("expected membership, got {other:?}"),
        }
        assert_eq!(
            vertex_membership(&g, &word("u"), &crate::graph::vid("a")),
            Membership::Out
        );
    }

    #[test]
    fn cyclic_core_detects_elliptic_and_hyperbolic() {
        let g = double_xy_uv();
        // conjugate of a vertex element is elliptic
        let w = word("x y x^-1").conjugate_by(&word("u"));
        let (conj, core) = cyclic_core(&g, &w).unwrap();
        assert_eq!(core.crossings(), 0);
        // conj · core · conj⁻¹ = w
        let rebuilt = conj.mul(&core.head).mul(&conj.inverse());
        assert!(is_trivial(&g, &rebuilt.mul(&w.inverse())).is_trivial());
        // x·u is hyperbolic
        let (_, core) = cyclic_core(&g, &word("x u")).unwrap();
        assert!(core.crossings() > 0);
    }

    #[test]
    fn verify_identity_and_swap_on_double() {
        let g = double_xy_uv();
        let p = g.fundamental_presentation();
        let id = GroupMap::identity(&p);
        let (id, notes) = verify_isomorphism(&id, &g, &g);
        assert_eq!(id.status, MapStatus::VerifiedIso, "{notes:?}");

        // swap the two sides: x↔u, y↔v; the relator maps to its inverse
        // up to the edge relation
        let mut fwd = BTreeMap::new();
        for (a, b) in [("x", "u"), ("y", "v"), ("u", "x"), ("v", "y")] {
            fwd.insert(sym(a), word(b));
        }
        let swap = GroupMap::new(p.clone(), p.clone(), fwd.clone()).with_backward(fwd);
        let (swap, notes) = verify_isomorphism(&swap, &g, &g);
        assert_eq!(swap.status, MapStatus::VerifiedIso, "{notes:?}");
    }

    #[test]
    fn proper_endomorphism_is_hom_only() {
        let g = single_free_vertex(1);
        let p = g.fundamental_presentation();
        let mut fwd = BTreeMap::new();
        fwd.insert(sym("x1"), word("x1^2"));
        let sq = GroupMap::new(p.clone(), p, fwd);
        let (sq, _) = verify_homomorphism(&sq, &g);
        assert_eq!(sq.status, MapStatus::VerifiedHom);
        let (sq, _) = verify_isomorphism(&sq, &g, &g);
        assert_ne!(sq.status, MapStatus::VerifiedIso);
    }
}
