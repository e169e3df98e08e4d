//! The splitting data structure: a directed graph with vertex groups, free
//! abelian edge groups, boundary embeddings, and a maximal tree, plus the
//! fundamental-group presentation it determines.

use crate::error::GogError;
use crate::group::{GroupClass, GroupHandle, Tri};
use crate::lattice::Lattice;
use crate::presentation::{GroupMap, MapStatus, Presentation};
use crate::word::{is_valid_symbol, Sym, Word};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

macro_rules! id_type {
    ($name:ident) => {
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub struct $name(String);

        impl $name {
            pub fn new(s: &str) -> Result<Self, GogError> {
                if is_valid_symbol(s) && !s.contains('_') {
                    Ok(Self(s.to_string()))
                } else {
                    Err(GogError::Parse(format!(
                        "bad id `{s}` (want [a-z][a-z0-9]*, no underscore)"
                    )))
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(VertexId);
id_type!(EdgeId);

/// Shorthand constructors for literals in tests and builders.
pub fn vid(s: &str) -> VertexId {
    VertexId::new(s).expect("bad vertex id literal")
}

pub fn eid(s: &str) -> EdgeId {
    EdgeId::new(s).expect("bad edge id literal")
}

/// Which end of an edge a statement refers to.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum End {
    Alpha,
    Omega,
}

impl End {
    pub fn other(self) -> End {
        match self {
            End::Alpha => End::Omega,
            End::Omega => End::Alpha,
        }
    }
}

/// An edge of groups: the edge group is Z^rank with the two boundary
/// embeddings given by the images of its standard basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: VertexId,
    pub to: VertexId,
    pub rank: usize,
    pub alpha: Vec<Word>,
    pub omega: Vec<Word>,
    pub tree: bool,
    pub silver: bool,
}

impl Edge {
    pub fn endpoint(&self, end: End) -> &VertexId {
        match end {
            End::Alpha => &self.from,
            End::Omega => &self.to,
        }
    }

    pub fn images(&self, end: End) -> &[Word] {
        match end {
            End::Alpha => &self.alpha,
            End::Omega => &self.omega,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct GraphOfGroups {
    vertices: BTreeMap<VertexId, GroupHandle>,
    edges: BTreeMap<EdgeId, Edge>,
}

impl GraphOfGroups {
    pub fn new() -> GraphOfGroups {
        GraphOfGroups::default()
    }

    pub fn add_vertex(&mut self, id: VertexId, group: GroupHandle) {
        self.vertices.insert(id, group);
    }

    pub fn add_edge(&mut self, id: EdgeId, edge: Edge) {
        self.edges.insert(id, edge);
    }

    pub fn vertices(&self) -> &BTreeMap<VertexId, GroupHandle> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeMap<EdgeId, Edge> {
        &self.edges
    }

    pub fn vertex(&self, v: &VertexId) -> &GroupHandle {
        &self.vertices[v]
    }

    pub fn edge(&self, e: &EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn vertex_mut(&mut self, v: &VertexId) -> &mut GroupHandle {
        self.vertices.get_mut(v).expect("vertex")
    }

    pub fn edge_mut(&mut self, e: &EdgeId) -> &mut Edge {
        self.edges.get_mut(e).expect("edge")
    }

    pub fn edges_mut(&mut self) -> &mut BTreeMap<EdgeId, Edge> {
        &mut self.edges
    }

    pub fn remove_edge(&mut self, e: &EdgeId) -> Option<Edge> {
        self.edges.remove(e)
    }

    pub fn remove_vertex(&mut self, v: &VertexId) -> Option<GroupHandle> {
        self.vertices.remove(v)
    }

    /// Stable-letter symbol for a non-tree edge.
    pub fn stable_sym(&self, e: &EdgeId) -> Sym {
        Sym::new(&format!("t_{e}")).expect("edge ids make valid symbols")
    }

    /// All incidences at `v` in the fixed local order: by edge id, alpha
    /// end before omega end. Loops appear twice.
    pub fn incidences(&self, v: &VertexId) -> Vec<(EdgeId, End)> {
        let mut out = Vec::new();
        for (id, e) in &self.edges {
            if e.from == *v {
                out.push((id.clone(), End::Alpha));
            }
            if e.to == *v {
                out.push((id.clone(), End::Omega));
            }
        }
        out
    }

    pub fn valency(&self, v: &VertexId) -> usize {
        self.incidences(v).len()
    }

    /// The vertex owning a generator symbol, if any.
    pub fn generator_vertex(&self, s: &Sym) -> Option<&VertexId> {
        self.vertices.iter().find(|(_, g)| g.gens().contains(s)).map(|(v, _)| v)
    }

    /// The non-tree edge owning a stable-letter symbol, if any.
    pub fn stable_edge(&self, s: &Sym) -> Option<EdgeId> {
        let name = s.as_str().strip_prefix("t_")?;
        let id = EdgeId::new(name).ok()?;
        match self.edges.get(&id) {
            Some(e) if !e.tree => Some(id),
            _ => None,
        }
    }

    pub fn tree_edges(&self) -> Vec<EdgeId> {
        self.edges.iter().filter(|(_, e)| e.tree).map(|(id, _)| id.clone()).collect()
    }

    /// Checks the tree flags describe a spanning tree of the underlying
    /// graph (connected and acyclic over all vertices).
    fn check_spanning_tree(&self) -> Result<(), GogError> {
        let n = self.vertices.len();
        let tree: Vec<&Edge> = self.edges.values().filter(|e| e.tree).collect();
        if n == 0 {
            return Err(GogError::validation("graph has no vertices"));
        }
        if tree.len() != n - 1 {
            return Err(GogError::validation(format!(
                "maximal subtree needs {} edges, found {}",
                n - 1,
                tree.len()
            )));
        }
        let mut seen: BTreeSet<&VertexId> = BTreeSet::new();
        let start = self.vertices.keys().next().unwrap();
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(v) = queue.pop_front() {
            for e in &tree {
                for (a, b) in [(&e.from, &e.to), (&e.to, &e.from)] {
                    if a == v && !seen.contains(b) {
                        seen.insert(b);
                        queue.push_back(b);
                    }
                }
            }
        }
        if seen.len() != n {
            return Err(GogError::validation("maximal subtree does not span the graph"));
        }
        Ok(())
    }

    /// Full structural validation. Returns notes for the checks that are
    /// only bounded (injectivity through inexact backends).
    pub fn validate(&self) -> Result<Vec<String>, GogError> {
        let mut notes = Vec::new();
        self.check_spanning_tree()?;
        // globally distinct generators, including stable letters
        let mut seen: BTreeMap<Sym, String> = BTreeMap::new();
        for (v, g) in &self.vertices {
            for s in g.gens() {
                if let Some(prev) = seen.insert(s.clone(), format!("vertex {v}")) {
                    return Err(GogError::validation(format!(
                        "generator {s} of vertex {v} already used at {prev}"
                    )));
                }
            }
        }
        for (id, e) in &self.edges {
            if !e.tree {
                let t = self.stable_sym(id);
                if let Some(prev) = seen.insert(t.clone(), format!("edge {id}")) {
                    return Err(GogError::validation(format!(
                        "stable letter {t} of edge {id} collides with {prev}"
                    )));
                }
            }
        }
        for (id, e) in &self.edges {
            for v in [&e.from, &e.to] {
                if !self.vertices.contains_key(v) {
                    return Err(GogError::validation(format!("edge {id} references missing vertex {v}")));
                }
            }
            if e.alpha.len() != e.rank || e.omega.len() != e.rank {
                return Err(GogError::validation(format!(
                    "edge {id} has rank {} but {}/{} boundary images",
                    e.rank,
                    e.alpha.len(),
                    e.omega.len()
                )));
            }
            for end in [End::Alpha, End::Omega] {
                let target = self.vertex(e.endpoint(end));
                let p = target.presentation();
                for w in e.images(end) {
                    p.check_word(w)
                        .map_err(|err| GogError::validation(format!("edge {id}: {err}")))?;
                }
                self.check_embedding(id, e, end, target, &mut notes)?;
            }
        }
        Ok(notes)
    }

    fn check_embedding(
        &self,
        id: &EdgeId,
        e: &Edge,
        end: End,
        target: &GroupHandle,
        notes: &mut Vec<String>,
    ) -> Result<(), GogError> {
        let images = e.images(end);
        if e.rank == 0 {
            return Ok(()); // trivial edge group: a free-product edge
        }
        match target.class() {
            GroupClass::Abelian => {
                let rows: Vec<Vec<i64>> = images.iter().map(|w| target.word_to_vector(w)).collect();
                let lat = Lattice::span(target.rank(), rows)?;
                if lat.rank() != e.rank {
                    return Err(GogError::validation(format!(
                        "edge {id}: boundary matrix into abelian vertex has rank {} < {}",
                        lat.rank(),
                        e.rank
                    )));
                }
            }
            GroupClass::Free | GroupClass::Surface(_) => {
                if e.rank > 1 {
                    return Err(GogError::validation(format!(
                        "edge {id}: rank {} edge group cannot embed in a {} vertex",
                        e.rank,
                        target.describe()
                    )));
                }
                if target.is_trivial_elem(&images[0]).is_trivial() {
                    return Err(GogError::validation(format!(
                        "edge {id}: boundary image is trivial in {}",
                        target.describe()
                    )));
                }
            }
            GroupClass::Rigid(_) => {
                for w in images {
                    match target.is_trivial_elem(w) {
                        Tri::Trivial => {
                            return Err(GogError::validation(format!(
                                "edge {id}: boundary image {w} is trivial in the rigid vertex"
                            )))
                        }
                        Tri::NonTrivial => {}
                        Tri::Unknown(r) => notes.push(format!(
                            "edge {id}: injectivity into rigid vertex unverified ({r})"
                        )),
                    }
                }
                for i in 0..images.len() {
                    for j in i + 1..images.len() {
                        let c = Word::commutator(&images[i], &images[j]);
                        match target.is_trivial_elem(&c) {
                            Tri::Trivial => {}
                            Tri::NonTrivial => {
                                return Err(GogError::validation(format!(
                                    "edge {id}: boundary images do not commute in the rigid vertex"
                                )))
                            }
                            Tri::Unknown(r) => notes
                                .push(format!("edge {id}: commutation unverified at bound ({r})")),
                        }
                    }
                }
                if e.rank > 1 {
                    // independence after abelianizing is a bounded stand-in
                    let rows: Vec<Vec<i64>> =
                        images.iter().map(|w| target.word_to_vector(w)).collect();
                    let lat = Lattice::span(target.rank(), rows)?;
                    if lat.rank() != e.rank {
                        notes.push(format!(
                            "edge {id}: abelianized boundary images are dependent; rank unverified"
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Generators of the fundamental group: all vertex generators followed
    /// by one stable letter per non-tree edge.
    pub fn fundamental_gens(&self) -> Vec<Sym> {
        let mut gens: Vec<Sym> = Vec::new();
        for g in self.vertices.values() {
            gens.extend(g.gens().iter().cloned());
        }
        for (id, e) in &self.edges {
            if !e.tree {
                gens.push(self.stable_sym(id));
            }
        }
        gens
    }

    /// The presentation of the fundamental group relative to the maximal
    /// tree: vertex relators, tree-edge identifications `α(b) = ω(b)`, and
    /// stable-letter relators `α(b) = t ω(b) t⁻¹`.
    pub fn fundamental_presentation(&self) -> Presentation {
        let mut relators: Vec<Word> = Vec::new();
        for g in self.vertices.values() {
            relators.extend(g.presentation().relators);
        }
        for (id, e) in &self.edges {
            for i in 0..e.rank {
                let a = &e.alpha[i];
                let o = &e.omega[i];
                if e.tree {
                    relators.push(a.mul(&o.inverse()));
                } else {
                    let t = Word::gen(self.stable_sym(id));
                    relators.push(a.mul(&t).mul(&o.inverse()).mul(&t.inverse()));
                }
            }
        }
        Presentation { gens: self.fundamental_gens(), relators }
    }

    /// Tree geodesic between two vertices as `(edge, end-entered-from)`
    /// steps; `end` is the end at the step's source vertex.
    pub fn tree_path(&self, from: &VertexId, to: &VertexId) -> Vec<(EdgeId, End)> {
        if from == to {
            return Vec::new();
        }
        let mut prev: BTreeMap<VertexId, (VertexId, EdgeId, End)> = BTreeMap::new();
        let mut queue = VecDeque::from([from.clone()]);
        let mut seen = BTreeSet::from([from.clone()]);
        'bfs: while let Some(v) = queue.pop_front() {
            for (id, e) in &self.edges {
                if !e.tree {
                    continue;
                }
                for (a, b, end) in [(&e.from, &e.to, End::Alpha), (&e.to, &e.from, End::Omega)] {
                    if *a == v && !seen.contains(b) {
                        seen.insert(b.clone());
                        prev.insert(b.clone(), (v.clone(), id.clone(), end));
                        if b == to {
                            break 'bfs;
                        }
                        queue.push_back(b.clone());
                    }
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = to.clone();
        while cur != *from {
            let (p, id, end) = prev.get(&cur).expect("tree spans").clone();
            path.push((id, end));
            cur = p;
        }
        path.reverse();
        path
    }

    /// Graph distance within the maximal tree.
    pub fn tree_distance(&self, a: &VertexId, b: &VertexId) -> usize {
        self.tree_path(a, b).len()
    }

    /// Lattice of an edge image inside an abelian endpoint.
    pub fn image_lattice(&self, e: &EdgeId, end: End) -> Option<Lattice> {
        let edge = self.edge(e);
        let target = self.vertex(edge.endpoint(end));
        if !target.is_abelian_class() {
            return None;
        }
        let rows = edge.images(end).iter().map(|w| target.word_to_vector(w)).collect();
        Lattice::span(target.rank(), rows).ok()
    }

    /// Does the image of this edge end equal the whole endpoint group?
    /// Exact for abelian and free endpoints, bounded otherwise.
    pub fn image_is_whole_vertex(&self, e: &EdgeId, end: End) -> Tri {
        let edge = self.edge(e);
        let target = self.vertex(edge.endpoint(end));
        let images = edge.images(end);
        match target.class() {
            GroupClass::Abelian => {
                let lat = self.image_lattice(e, end).expect("abelian endpoint");
                Tri::from_bool(lat.is_full())
            }
            GroupClass::Free => Tri::from_bool(crate::stallings::generates_free_group(
                images,
                target.gens(),
            )),
            GroupClass::Surface(_) => {
                // a cyclic subgroup is never the whole surface group here
                Tri::NonTrivial
            }
            GroupClass::Rigid(data) => match data.strategy {
                crate::group::Strategy::Free => Tri::from_bool(
                    crate::stallings::generates_free_group(images, target.gens()),
                ),
                _ => Tri::Unknown("surjectivity onto rigid vertex unverified".into()),
            },
        }
    }

    /// Renames every vertex generator through `rename` (a bijection).
    pub fn renamed(&self, rename: &BTreeMap<Sym, Sym>) -> GraphOfGroups {
        let sub = |w: &Word| -> Word {
            w.substitute(&|s: &Sym| {
                Some(Word::gen(rename.get(s).cloned().unwrap_or_else(|| s.clone())))
            })
            .expect("total rename")
        };
        let mut out = GraphOfGroups::new();
        for (v, g) in &self.vertices {
            out.add_vertex(v.clone(), g.renamed(rename));
        }
        for (id, e) in &self.edges {
            out.add_edge(
                id.clone(),
                Edge {
                    from: e.from.clone(),
                    to: e.to.clone(),
                    rank: e.rank,
                    alpha: e.alpha.iter().map(&sub).collect(),
                    omega: e.omega.iter().map(&sub).collect(),
                    tree: e.tree,
                    silver: e.silver,
                },
            );
        }
        out
    }

    /// Transport along a verified isomorphism `φ` out of this graph's
    /// fundamental group: the same underlying graph with vertex groups and
    /// boundary data carried over. When `φ` relabels generators bijectively
    /// the handles are renamed; otherwise the structure is kept and the
    /// returned dictionary records what each generator now denotes.
    pub fn push_forward(&self, phi: &GroupMap) -> Result<(GraphOfGroups, GroupMap), GogError> {
        if phi.status != MapStatus::VerifiedIso {
            return Err(GogError::domain("push-forward requires a verified isomorphism"));
        }
        let own = self.fundamental_presentation();
        if own.gens != phi.source.gens {
            return Err(GogError::domain("map source does not match this graph"));
        }
        // pure relabeling: bijective single-letter images
        let mut rename: BTreeMap<Sym, Sym> = BTreeMap::new();
        let mut relabel = true;
        for (g, w) in &phi.forward {
            if w.len() == 1 && !w.letters()[0].inv {
                rename.insert(g.clone(), w.letters()[0].sym.clone());
            } else {
                relabel = false;
                break;
            }
        }
        let values: BTreeSet<&Sym> = rename.values().collect();
        if relabel && values.len() == rename.len() {
            let out = self.renamed(&rename);
            let dict = GroupMap {
                source: out.fundamental_presentation(),
                target: phi.target.clone(),
                forward: rename
                    .iter()
                    .map(|(_, new)| (new.clone(), Word::gen(new.clone())))
                    .collect(),
                backward: None,
                status: MapStatus::Unchecked,
            };
            return Ok((out, dict));
        }
        let dict = GroupMap {
            source: own,
            target: phi.target.clone(),
            forward: phi.forward.clone(),
            backward: phi.backward.clone(),
            status: phi.status,
        };
        Ok((self.clone(), dict))
    }

    /// Re-chooses the maximal tree. Returns the new graph and the verified
    /// change-of-presentation isomorphism (old → new), built by reading
    /// each old generator as a loop and evaluating it over the new tree.
    pub fn change_tree(&self, new_tree: &BTreeSet<EdgeId>) -> Result<(GraphOfGroups, GroupMap), GogError> {
        let mut out = self.clone();
        for (id, e) in out.edges.iter_mut() {
            e.tree = new_tree.contains(id);
        }
        out.check_spanning_tree()?;
        let base = self.vertices.keys().next().unwrap().clone();
        // χ'(path): stable letters of the new presentation read along a path
        let read = |g: &GraphOfGroups, path: &[(EdgeId, End)]| -> Word {
            let mut w = Word::identity();
            for (id, end) in path {
                if g.edge(id).tree {
                    continue;
                }
                let t = Word::gen(g.stable_sym(id));
                w = w.mul(&if *end == End::Alpha { t } else { t.inverse() });
            }
            w
        };
        let old_p = self.fundamental_presentation();
        let new_p = out.fundamental_presentation();
        let mut forward = BTreeMap::new();
        for (v, handle) in &self.vertices {
            let conj = read(&out, &out.tree_path(&base, v));
            for g in handle.gens() {
                forward.insert(g.clone(), Word::gen(g.clone()).conjugate_by(&conj));
            }
        }
        for (id, e) in &self.edges {
            if e.tree {
                continue;
            }
            let head = read(&out, &out.tree_path(&base, &e.from));
            let cross = if out.edge(id).tree {
                Word::identity()
            } else {
                Word::gen(out.stable_sym(id))
            };
            let tail = read(&out, &out.tree_path(&e.to, &base));
            forward.insert(self.stable_sym(id), head.mul(&cross).mul(&tail));
        }
        let mut backward = BTreeMap::new();
        for (v, handle) in &out.vertices {
            let conj = read(self, &self.tree_path(&base, v));
            for g in handle.gens() {
                backward.insert(g.clone(), Word::gen(g.clone()).conjugate_by(&conj));
            }
        }
        for (id, e) in &out.edges {
            if e.tree {
                continue;
            }
            let head = read(self, &self.tree_path(&base, &e.from));
            let cross = if self.edge(id).tree {
                Word::identity()
            } else {
                Word::gen(self.stable_sym(id))
            };
            let tail = read(self, &self.tree_path(&e.to, &base));
            backward.insert(out.stable_sym(id), head.mul(&cross).mul(&tail));
        }
        let map = GroupMap {
            source: old_p,
            target: new_p,
            forward,
            backward: Some(backward),
            status: MapStatus::Unchecked,
        };
        Ok((out, map))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::*;
    use crate::word::{sym, word};

    #[test]
    fn amalgam_presentation() {
        let g = double_free("x", "y", "u", "v", &word("x^2 y^3"), &word("u^2 v^3"));
        let p = g.fundamental_presentation();
        assert_eq!(p.gens, vec![sym("x"), sym("y"), sym("u"), sym("v")]);
        assert_eq!(p.relators, vec![word("x^2 y^3 v^-3 u^-2")]);
        assert!(g.validate().unwrap().is_empty());
    }

    #[test]
    fn hnn_presentation() {
        let g = hnn_z2();
        let p = g.fundamental_presentation();
        assert_eq!(p.gens, vec![sym("x"), sym("t_e")]);
        // α(g) = t ω(g) t⁻¹ reads x = t x t⁻¹
        assert_eq!(p.relators, vec![word("x t_e x^-1 t_e^-1")]);
    }

    #[test]
    fn abelian_star_presentation() {
        // ⟨m1, m2, x, y | [m1, m2], m1 = x²y³⟩ with generators listed in
        // vertex-id order (vertex a before vertex m)
        let g = star_abelian_center();
        let p = g.fundamental_presentation();
        assert_eq!(p.gens, vec![sym("x"), sym("y"), sym("m1"), sym("m2")]);
        assert_eq!(
            p.relators,
            vec![word("m1 m2 m1^-1 m2^-1"), word("m1 y^-3 x^-2")]
        );
    }

    #[test]
    fn spanning_tree_is_checked() {
        let mut g = double_free("x", "y", "u", "v", &word("x^2 y^3"), &word("u^2 v^3"));
        g.edge_mut(&eid("e")).tree = false;
        let err = g.validate().unwrap_err();
        assert!(err.to_string().contains("maximal subtree"));
    }

    #[test]
    fn generator_collisions_rejected() {
        let mut g = GraphOfGroups::new();
        g.add_vertex(vid("a"), GroupHandle::free_named(vec![sym("x")]));
        g.add_vertex(vid("b"), GroupHandle::free_named(vec![sym("x")]));
        g.add_edge(
            eid("e"),
            Edge {
                from: vid("a"),
                to: vid("b"),
                rank: 1,
                alpha: vec![word("x")],
                omega: vec![word("x")],
                tree: true,
                silver: false,
            },
        );
        assert!(g.validate().is_err());
    }

    #[test]
    fn trivial_boundary_image_rejected() {
        let mut g = double_free("x", "y", "u", "v", &word("x^2 y^3"), &word("u^2 v^3"));
        g.edge_mut(&eid("e")).alpha = vec![word("1")];
        assert!(g.validate().is_err());
    }

    #[test]
    fn rank_two_into_free_rejected() {
        let mut g = GraphOfGroups::new();
        g.add_vertex(vid("a"), GroupHandle::free_named(vec![sym("x"), sym("y")]));
        g.add_vertex(vid("m"), GroupHandle::abelian_named(vec![sym("m1"), sym("m2")]));
        g.add_edge(
            eid("e"),
            Edge {
                from: vid("m"),
                to: vid("a"),
                rank: 2,
                alpha: vec![word("m1"), word("m2")],
                omega: vec![word("x"), word("y")],
                tree: true,
                silver: false,
            },
        );
        assert!(g.validate().is_err());
    }

    #[test]
    fn tree_paths_are_geodesics() {
        let g = star_abelian_center();
        assert_eq!(g.tree_path(&vid("m"), &vid("a")).len(), 1);
        assert_eq!(g.tree_path(&vid("a"), &vid("a")).len(), 0);
    }

    #[test]
    fn change_tree_moves_stable_letter() {
        // a two-vertex graph with two parallel edges: swapping which edge
        // is in the tree renames the stable letter
        let g = theta_graph();
        let new_tree = BTreeSet::from([eid("f")]);
        let (h, map) = g.change_tree(&new_tree).unwrap();
        assert!(h.edge(&eid("f")).tree && !h.edge(&eid("e")).tree);
        assert!(map.forward.contains_key(&g.stable_sym(&eid("f"))));
        // vertex generators of the base vertex stay put
        assert_eq!(map.forward[&sym("x")], word("x"));
    }

    #[test]
    fn push_forward_relabeling_mirrors_graph() {
        let g = double_free("x", "y", "u", "v", &word("x^2 y^3"), &word("u^2 v^3"));
        let p = g.fundamental_presentation();
        let mut fwd = BTreeMap::new();
        for (a, b) in [("x", "u"), ("y", "v"), ("u", "x"), ("v", "y")] {
            fwd.insert(sym(a), word(b));
        }
        let mut phi = GroupMap::new(p.clone(), p, fwd.clone());
        phi.backward = Some(fwd);
        phi.status = MapStatus::VerifiedIso;
        let (h, _) = g.push_forward(&phi).unwrap();
        assert_eq!(h.vertex(&vid("a")).gens(), &[sym("u"), sym("v")]);
        assert_eq!(h.edge(&eid("e")).alpha, vec![word("u^2 v^3")]);
    }
}
