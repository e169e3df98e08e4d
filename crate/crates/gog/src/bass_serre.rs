//! Bounded exploration of the covering tree of a splitting: coset-labeled
//! balls, the natural lift of the quotient graph, acylindricity probes and
//! ellipticity searches. Everything here is desk-scale and explicit about
//! the bounds it ran with.

use crate::config::Bounds;
use crate::error::GogError;
use crate::graph::{End, EdgeId, GraphOfGroups, VertexId};
use crate::group::GroupClass;
use crate::word::{Letter, Word};
use crate::word_problem::{self, coset_canonical, CosetRep, Membership};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// A vertex of the covering tree: the coset `rep · G_vertex`.
#[derive(Clone, Debug)]
pub struct BallVertex {
    pub vertex: VertexId,
    pub rep: Word,
    pub depth: usize,
    /// Coset separation for this node used an inexact backend.
    pub unresolved: bool,
    /// Expansion below this node was cut off by the bounds.
    pub truncated: bool,
}

#[derive(Clone, Debug)]
pub struct BallEdge {
    pub parent: usize,
    pub child: usize,
    pub edge: EdgeId,
}

/// A ball in the covering tree, rooted at index 0.
#[derive(Clone, Debug)]
pub struct TreeBall {
    pub radius: usize,
    pub rep_bound: usize,
    pub vertices: Vec<BallVertex>,
    pub edges: Vec<BallEdge>,
}

impl TreeBall {
    pub fn neighbors(&self, n: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for e in &self.edges {
            if e.parent == n {
                out.push(e.child);
            }
            if e.child == n {
                out.push(e.parent);
            }
        }
        out
    }

    /// Plain-text edge list with coset labels.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, v) in self.vertices.iter().enumerate() {
            out.push_str(&format!(
                "vertex {i}: {} rep={}{}{}\n",
                v.vertex,
                v.rep,
                if v.unresolved { " unresolved" } else { "" },
                if v.truncated { " truncated" } else { "" },
            ));
        }
        for e in &self.edges {
            out.push_str(&format!("edge {} -- {} via {}\n", e.parent, e.child, e.edge));
        }
        out
    }
}

/// Enumerates coset representatives of `G_v / image` with representative
/// words of length at most `max_len`. The booleans mark inexact (bounded)
/// separation and truncation; the trivial coset is always first.
fn enumerate_cosets(
    g: &GraphOfGroups,
    e: &EdgeId,
    end: End,
    max_len: usize,
) -> (Vec<Word>, bool, bool) {
    let edge = g.edge(e);
    let vertex = edge.endpoint(end);
    let handle = g.vertex(vertex);
    let mut reps: Vec<Word> = vec![Word::identity()];
    let mut seen: BTreeSet<Word> = BTreeSet::from([Word::identity()]);
    let mut inexact = false;
    let mut truncated = false;
    if let GroupClass::Abelian = handle.class() {
        let lat = g.image_lattice(e, end).expect("abelian endpoint");
        let n = handle.rank();
        let mut v = vec![-(max_len as i64); n];
        loop {
            let norm: i64 = v.iter().map(|x| x.abs()).sum();
            if norm <= max_len as i64 {
                let residue = lat.coset_residue(&v);
                let rep = handle.vector_to_word(&residue);
                if rep.len() <= max_len {
                    if seen.insert(rep.clone()) {
                        reps.push(rep);
                    }
                } else {
                    truncated = true;
                }
            }
            let mut i = 0;
            loop {
                if i == n {
                    return (reps, inexact, truncated);
                }
                v[i] += 1;
                if v[i] <= max_len as i64 {
                    break;
                }
                v[i] = -(max_len as i64);
                i += 1;
            }
        }
    }
    // one canonicalizer per call; subgroup graphs are built once
    let images = edge.images(end);
    let free_like = matches!(handle.class(), GroupClass::Free)
        || matches!(handle.class(), GroupClass::Rigid(d) if matches!(d.strategy, crate::group::Strategy::Free));
    let stallings = if free_like && edge.rank > 0 {
        Some(crate::stallings::SubgroupGraph::new(images))
    } else {
        None
    };
    let canonical = |w: &Word| -> (Word, bool) {
        match &stallings {
            Some(graph) => {
                let key = graph.coset_key(w);
                (graph.coset_rep(&key), true)
            }
            None => match coset_canonical(g, e, end, w) {
                CosetRep::Exact(rep) => (rep, true),
                CosetRep::Bounded(rep) => (rep, false),
            },
        }
    };
    // breadth-first over reduced words in the vertex generators
    let mut layer: Vec<Word> = vec![Word::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for s in handle.gens() {
                for inv in [false, true] {
                    let cand = w.mul(&Word::reduce([Letter { sym: s.clone(), inv }]));
                    if cand.len() != w.len() + 1 {
                        continue;
                    }
                    let (rep, exact) = canonical(&cand);
                    if !exact {
                        inexact = true;
                    }
                    if rep.len() <= max_len {
                        if seen.insert(rep.clone()) {
                            reps.push(rep);
                        }
                    } else {
                        truncated = true;
                    }
                    next.push(cand);
                }
            }
        }
        layer = next;
    }
    (reps, inexact, truncated)
}

/// Memoized coset enumeration keyed by `(edge, end, length budget)`.
struct CosetCache {
    memo: BTreeMap<(EdgeId, End, usize), (Vec<Word>, bool, bool)>,
}

impl CosetCache {
    fn new() -> Self {
        CosetCache { memo: BTreeMap::new() }
    }

    fn get(
        &mut self,
        g: &GraphOfGroups,
        e: &EdgeId,
        end: End,
        max_len: usize,
    ) -> (Vec<Word>, bool, bool) {
        self.memo
            .entry((e.clone(), end, max_len))
            .or_insert_with(|| enumerate_cosets(g, e, end, max_len))
            .clone()
    }
}

/// Builds the ball of the covering tree around `1·G_base`: every vertex
/// within the radius whose representative stays within the length bound.
pub fn tree_ball(
    g: &GraphOfGroups,
    base: &VertexId,
    radius: usize,
    rep_len: usize,
) -> Result<TreeBall, GogError> {
    if !g.vertices().contains_key(base) {
        return Err(GogError::domain(format!("no vertex {base}")));
    }
    let mut ball = TreeBall {
        radius,
        rep_bound: rep_len,
        vertices: vec![BallVertex {
            vertex: base.clone(),
            rep: Word::identity(),
            depth: 0,
            unresolved: false,
            truncated: false,
        }],
        edges: Vec::new(),
    };
    // (node, edge-and-direction that reached it)
    let mut cache = CosetCache::new();
    let mut queue: VecDeque<(usize, Option<(EdgeId, bool)>)> = VecDeque::from([(0, None)]);
    while let Some((n, came)) = queue.pop_front() {
        let (depth, rep, vertex) = {
            let v = &ball.vertices[n];
            (v.depth, v.rep.clone(), v.vertex.clone())
        };
        if depth == radius {
            continue;
        }
        for (eid, end) in g.incidences(&vertex) {
            let edge = g.edge(&eid);
            let forward = end == End::Alpha;
            let remaining = rep_len.saturating_sub(rep.len());
            let (cosets, inexact, trunc) = cache.get(g, &eid, end, remaining);
            if trunc {
                ball.vertices[n].truncated = true;
            }
            let crossing_word = if edge.tree {
                Word::identity()
            } else {
                let t = Word::gen(g.stable_sym(&eid));
                if forward {
                    t
                } else {
                    t.inverse()
                }
            };
            let far = edge.endpoint(end.other()).clone();
            for (ci, a) in cosets.iter().enumerate() {
                // the trivial coset through the reverse of the incoming
                // edge is the parent
                if ci == 0 {
                    if let Some((back_edge, back_fwd)) = &came {
                        if *back_edge == eid && *back_fwd != forward {
                            continue;
                        }
                    }
                }
                let child_rep = rep.mul(a).mul(&crossing_word);
                if child_rep.len() > rep_len {
                    ball.vertices[n].truncated = true;
                    continue;
                }
                let idx = ball.vertices.len();
                ball.vertices.push(BallVertex {
                    vertex: far.clone(),
                    rep: child_rep,
                    depth: depth + 1,
                    unresolved: inexact,
                    truncated: false,
                });
                ball.edges.push(BallEdge { parent: n, child: idx, edge: eid.clone() });
                queue.push_back((idx, Some((eid.clone(), forward))));
            }
        }
    }
    Ok(ball)
}

/// Does `w` stabilize the ball vertex `n`, i.e. `rep⁻¹ w rep ∈ G_v`?
pub fn stabilizes(g: &GraphOfGroups, ball: &TreeBall, n: usize, w: &Word) -> Membership {
    let v = &ball.vertices[n];
    word_problem::vertex_membership(g, &v.rep.inverse().mul(w).mul(&v.rep), &v.vertex)
}

/// The natural lift of the quotient graph into the ball: one ball vertex
/// per quotient vertex whose stabilizer is exactly that vertex group.
#[derive(Clone, Debug)]
pub enum LiftOutcome {
    Lift {
        vertices: BTreeMap<VertexId, usize>,
        edges: BTreeMap<EdgeId, usize>,
    },
    Failure {
        reason: String,
        /// Ball vertices found with the same full stabilizer.
        duplicates: Vec<usize>,
    },
}

pub fn natural_lift(g: &GraphOfGroups, ball: &TreeBall) -> Result<LiftOutcome, GogError> {
    let mut vertices: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (v, handle) in g.vertices() {
        let mut hits: Vec<usize> = Vec::new();
        for n in 0..ball.vertices.len() {
            let node = &ball.vertices[n];
            if node.vertex != *v {
                continue;
            }
            // G_v ⊆ Stab(n) and Stab(n) ⊆ G_v, both on generators
            let mut stabilized = true;
            for s in handle.gens() {
                match stabilizes(g, ball, n, &Word::gen(s.clone())) {
                    Membership::In(_) => {}
                    Membership::Out => {
                        stabilized = false;
                        break;
                    }
                    Membership::Unknown(r) => return Err(GogError::Abstained(r)),
                }
            }
            if !stabilized {
                continue;
            }
            let mut contained = true;
            for s in g.vertex(&node.vertex).gens() {
                let conj = node.rep.mul(&Word::gen(s.clone())).mul(&node.rep.inverse());
                match word_problem::vertex_membership(g, &conj, v) {
                    Membership::In(_) => {}
                    Membership::Out => {
                        contained = false;
                        break;
                    }
                    Membership::Unknown(r) => return Err(GogError::Abstained(r)),
                }
            }
            if contained {
                hits.push(n);
            }
        }
        match hits.len() {
            0 => {
                return Ok(LiftOutcome::Failure {
                    reason: format!("no ball vertex has stabilizer exactly G_{v}"),
                    duplicates: vec![],
                })
            }
            1 => {
                vertices.insert(v.clone(), hits[0]);
            }
            _ => {
                return Ok(LiftOutcome::Failure {
                    reason: format!(
                        "{} ball vertices share the stabilizer G_{v}; the splitting is not \
                         semi-reduced and 2-acylindrical together",
                        hits.len()
                    ),
                    duplicates: hits,
                })
            }
        }
    }
    // edges: tree edges join the lifted endpoints; non-tree edges join
    // λ(i(e)) to the stable-letter translate of λ(τ(e))
    let mut edges: BTreeMap<EdgeId, usize> = BTreeMap::new();
    for (eid, edge) in g.edges() {
        let from_node = vertices[&edge.from];
        let mut found = None;
        for (bi, be) in ball.edges.iter().enumerate() {
            if be.edge != *eid {
                continue;
            }
            let (a, b) = (be.parent, be.child);
            let other = if a == from_node {
                b
            } else if b == from_node {
                a
            } else {
                continue;
            };
            // expected far endpoint: λ(τ(e)) shifted by t_e for non-tree
            let expected = if edge.tree {
                ball.vertices[vertices[&edge.to]].rep.clone()
            } else {
                Word::gen(g.stable_sym(eid)).mul(&ball.vertices[vertices[&edge.to]].rep)
            };
            let diff = ball.vertices[other].rep.inverse().mul(&expected);
            match word_problem::vertex_membership(g, &diff, &edge.to) {
                Membership::In(_) => {
                    found = Some(bi);
                    break;
                }
                Membership::Out => {}
                Membership::Unknown(r) => return Err(GogError::Abstained(r)),
            }
        }
        match found {
            Some(bi) => {
                edges.insert(eid.clone(), bi);
            }
            None => {
                return Ok(LiftOutcome::Failure {
                    reason: format!("ball too shallow to contain the lift of edge {eid}"),
                    duplicates: vec![],
                })
            }
        }
    }
    Ok(LiftOutcome::Lift { vertices, edges })
}

/// Result of a bounded acylindricity check.
#[derive(Clone, Debug)]
pub enum ProbeOutcome {
    /// No fixed set of diameter exceeding `k` was found in the ball.
    Pass { notes: Vec<String> },
    /// Witness: the element and a fixed path longer than `k`.
    Fail { element: Word, path: Vec<Word> },
    Unknown { reason: String },
}

/// Default probe samples: edge-group generator images and their short
/// vertex-group conjugates.
pub fn default_probe_samples(g: &GraphOfGroups, conj_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for (_, edge) in g.edges() {
        for (end, images) in [(End::Alpha, &edge.alpha), (End::Omega, &edge.omega)] {
            let vertex = g.vertex(edge.endpoint(end));
            for img in images {
                out.push(img.clone());
                for s in vertex.gens().iter().take(2) {
                    for len in 1..=conj_len.min(2) {
                        let c = Word::gen(s.clone()).pow(len as i64);
                        out.push(img.conjugate_by(&c));
                    }
                }
            }
        }
    }
    out.sort_by_key(|w| (w.len(), w.display()));
    out.dedup();
    out
}

/// Checks `diam(Fix(s)) ≤ k` inside the ball for each sample element.
pub fn acylindricity_probe(
    g: &GraphOfGroups,
    ball: &TreeBall,
    k: usize,
    samples: &[Word],
) -> Result<ProbeOutcome, GogError> {
    let mut notes = Vec::new();
    for s in samples {
        match word_problem::is_trivial(g, s) {
            crate::group::Tri::Trivial => {
                return Err(GogError::domain(format!("probe sample {s} is the identity")))
            }
            crate::group::Tri::NonTrivial => {}
            crate::group::Tri::Unknown(r) => {
                notes.push(format!("sample {s}: triviality unknown ({r})"));
                continue;
            }
        }
        let mut fixed: Vec<usize> = Vec::new();
        for n in 0..ball.vertices.len() {
            match stabilizes(g, ball, n, s) {
                Membership::In(_) => fixed.push(n),
                Membership::Out => {}
                Membership::Unknown(r) => {
                    notes.push(format!("sample {s} at node {n}: {r}"));
                }
            }
        }
        if fixed.len() < 2 {
            continue;
        }
        // BFS diameters within the fixed subgraph
        let index: BTreeMap<usize, usize> =
            fixed.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        for &start in &fixed {
            let mut dist: BTreeMap<usize, (usize, Vec<usize>)> = BTreeMap::new();
            dist.insert(start, (0, vec![start]));
            let mut queue = VecDeque::from([start]);
            while let Some(n) = queue.pop_front() {
                let (d, path) = dist[&n].clone();
                for m in ball.neighbors(n) {
                    if index.contains_key(&m) && !dist.contains_key(&m) {
                        let mut p = path.clone();
                        p.push(m);
                        dist.insert(m, (d + 1, p));
                        queue.push_back(m);
                    }
                }
            }
            if let Some((_, (d, path))) = dist.iter().max_by_key(|(_, (d, _))| *d) {
                if *d > k {
                    return Ok(ProbeOutcome::Fail {
                        element: s.clone(),
                        path: path.iter().map(|&n| ball.vertices[n].rep.clone()).collect(),
                    });
                }
            }
        }
    }
    if ball.vertices.iter().any(|v| v.unresolved) {
        notes.push("ball contains unresolved coset separations".into());
    }
    Ok(ProbeOutcome::Pass { notes })
}

/// Ellipticity of the subgroup generated by `words`.
#[derive(Clone, Debug)]
pub enum Ellipticity {
    /// `conjugator · ⟨S⟩ · conjugator⁻¹ ⊆ G_vertex`, membership-checked.
    Yes { vertex: VertexId, conjugator: Word },
    /// Exhausted the bounded search; includes a definite hyperbolicity
    /// witness when one was found.
    NoEvidence { reason: String },
}

pub fn is_elliptic(
    g: &GraphOfGroups,
    words: &[Word],
    bounds: &Bounds,
) -> Result<Ellipticity, GogError> {
    let base = g
        .vertices()
        .keys()
        .next()
        .cloned()
        .ok_or_else(|| GogError::validation("empty graph"))?;
    if words.is_empty() {
        return Ok(Ellipticity::Yes { vertex: base, conjugator: Word::identity() });
    }
    // hyperbolic element or pairwise product rules the subgroup out
    for (i, w) in words.iter().enumerate() {
        let (_, core) = word_problem::cyclic_core(g, w)?;
        if core.crossings() > 0 {
            return Ok(Ellipticity::NoEvidence {
                reason: format!("generator {w} is hyperbolic"),
            });
        }
        for v in &words[i + 1..] {
            let (_, core) = word_problem::cyclic_core(g, &w.mul(v))?;
            if core.crossings() > 0 {
                return Ok(Ellipticity::NoEvidence {
                    reason: format!("product {w}·{v} is hyperbolic"),
                });
            }
        }
    }
    // all generators and pairwise products are elliptic: search for a
    // common fixed vertex near a fixed vertex of the first generator
    let (conj, core) = word_problem::cyclic_core(g, &words[0])?;
    let seed_vertex = core.base.clone();
    let seed_rep = conj.clone();
    let ball = tree_ball(g, &seed_vertex, bounds.radius, bounds.rep_len)?;
    let check_all = |rep: &Word, vertex: &VertexId| -> Result<bool, GogError> {
        for s in words {
            match word_problem::vertex_membership(g, &rep.inverse().mul(s).mul(rep), vertex) {
                Membership::In(_) => {}
                Membership::Out => return Ok(false),
                Membership::Unknown(r) => return Err(GogError::Abstained(r)),
            }
        }
        Ok(true)
    };
    for node in &ball.vertices {
        let rep = seed_rep.mul(&node.rep);
        if rep.len() > bounds.conj_len {
            continue;
        }
        if check_all(&rep, &node.vertex)? {
            return Ok(Ellipticity::Yes { vertex: node.vertex.clone(), conjugator: rep.inverse() });
        }
    }
    Ok(Ellipticity::NoEvidence {
        reason: format!(
            "no common fixed vertex with conjugator length ≤ {} at radius {}",
            bounds.conj_len, bounds.radius
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::*;
    use crate::graph::vid;
    use crate::word::word;

    #[test]
    fn hnn_ball_is_a_line() {
        // cosets of ⟨x⟩ in Z² enumerate by powers of t
        let g = hnn_z2();
        let ball = tree_ball(&g, &vid("v"), 2, 6).unwrap();
        assert_eq!(ball.vertices.len(), 5);
        let mut reps: Vec<String> = ball.vertices.iter().map(|v| v.rep.display()).collect();
        reps.sort();
        assert_eq!(reps, vec!["1", "t_e", "t_e^-1", "t_e^-2", "t_e^2"]);
        // a line: every inner vertex has two neighbors
        assert_eq!(ball.edges.len(), 4);
    }

    #[test]
    fn radius_zero_is_a_point() {
        let g = double_xy_uv();
        let ball = tree_ball(&g, &vid("a"), 0, 6).unwrap();
        assert_eq!(ball.vertices.len(), 1);
    }

    #[test]
    fn double_ball_at_radius_one() {
        // center plus one b-coset vertex per representative of A/⟨x²y³⟩
        let g = double_xy_uv();
        let ball = tree_ball(&g, &vid("a"), 1, 3).unwrap();
        assert!(ball.vertices.len() > 1);
        for v in &ball.vertices[1..] {
            assert_eq!(v.vertex, vid("b"));
        }
        // all coset representatives distinct through the subgroup graph
        let mut reps: Vec<(String, String)> =
            ball.vertices.iter().map(|v| (v.vertex.to_string(), v.rep.display())).collect();
        let before = reps.len();
        reps.sort();
        reps.dedup();
        assert_eq!(reps.len(), before);
    }

    #[test]
    fn ball_is_a_tree() {
        let g = normalized_double();
        let ball = tree_ball(&g, &vid("z"), 3, 4).unwrap();
        assert_eq!(ball.edges.len(), ball.vertices.len() - 1);
    }

    #[test]
    fn lift_of_double_is_central_edge() {
        let g = double_xy_uv();
        let ball = tree_ball(&g, &vid("a"), 2, 4).unwrap();
        match natural_lift(&g, &ball).unwrap() {
            LiftOutcome::Lift { vertices, edges } => {
                assert_eq!(vertices.len(), 2);
                assert_eq!(edges.len(), 1);
                assert_eq!(ball.vertices[vertices[&vid("a")]].rep, Word::identity());
            }
            LiftOutcome::Failure { reason, .. } => panic!("lift failed: {reason}"),
        }
    }

    #[test]
    fn lift_fails_on_z2_hnn() {
        // Fix(x) is the whole line: many vertices share the stabilizer ⟨x⟩
        let g = hnn_z2();
        let ball = tree_ball(&g, &vid("v"), 2, 6).unwrap();
        match natural_lift(&g, &ball).unwrap() {
            LiftOutcome::Failure { duplicates, .. } => assert!(duplicates.len() >= 2),
            LiftOutcome::Lift { .. } => panic!("expected a failure report"),
        }
    }

    #[test]
    fn probe_fails_on_z2_control() {
        let g = hnn_z2();
        let ball = tree_ball(&g, &vid("v"), 3, 6).unwrap();
        match acylindricity_probe(&g, &ball, 2, &[word("x")]).unwrap() {
            ProbeOutcome::Fail { element, path } => {
                assert_eq!(element, word("x"));
                assert!(path.len() > 3);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn probe_passes_on_double() {
        let g = double_xy_uv();
        let ball = tree_ball(&g, &vid("a"), 3, 4).unwrap();
        let samples = default_probe_samples(&g, 4);
        match acylindricity_probe(&g, &ball, 2, &samples).unwrap() {
            ProbeOutcome::Pass { .. } => {}
            other => panic!("expected pass, got {other:?}"),
        }
    }

    #[test]
    fn probe_rejects_identity_sample() {
        let g = double_xy_uv();
        let ball = tree_ball(&g, &vid("a"), 1, 2).unwrap();
        assert!(acylindricity_probe(&g, &ball, 2, &[Word::identity()]).is_err());
    }

    #[test]
    fn edge_group_images_are_elliptic() {
        let g = double_xy_uv();
        let b = Bounds { radius: 2, rep_len: 4, ..Bounds::default() };
        match is_elliptic(&g, &[word("x^2 y^3")], &b).unwrap() {
            Ellipticity::Yes { conjugator, .. } => assert_eq!(conjugator, Word::identity()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_conjugates_found() {
        let g = double_xy_uv();
        let b = Bounds { radius: 2, rep_len: 4, ..Bounds::default() };
        let s = word("x y").conjugate_by(&word("u"));
        match is_elliptic(&g, &[s.clone()], &b).unwrap() {
            Ellipticity::Yes { vertex, conjugator } => {
                assert_eq!(vertex, vid("a"));
                let moved = s.conjugate_by(&conjugator);
                assert!(matches!(
                    word_problem::vertex_membership(&g, &moved, &vertex),
                    Membership::In(_)
                ));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cross_vertex_subgroup_is_not_elliptic() {
        // {x, u} generate a subgroup meeting both sides; x·u is hyperbolic
        let g = double_xy_uv();
        let b = Bounds { radius: 2, rep_len: 8, conj_len: 8, ..Bounds::default() };
        match is_elliptic(&g, &[word("x"), word("u")], &b).unwrap() {
            Ellipticity::NoEvidence { reason } => assert!(reason.contains("hyperbolic")),
            other => panic!("{other:?}"),
        }
    }
}
