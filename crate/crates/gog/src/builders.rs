//! Ready-made splittings used throughout the tests, the guide, and the
//! corpus generator.

use crate::graph::{eid, vid, Edge, GraphOfGroups};
use crate::group::GroupHandle;
use crate::surface::SurfaceSig;
use crate::word::{sym, word, Word};

fn edge(from: &str, to: &str, alpha: Vec<Word>, omega: Vec<Word>, tree: bool) -> Edge {
    Edge {
        from: vid(from),
        to: vid(to),
        rank: alpha.len(),
        alpha,
        omega,
        tree,
        silver: false,
    }
}

/// One free vertex `v` with generators `x1..xN`; the fundamental group is
/// free of that rank.
pub fn single_free_vertex(rank: usize) -> GraphOfGroups {
    let mut g = GraphOfGroups::new();
    g.add_vertex(vid("v"), GroupHandle::free(rank));
    g
}

/// One abelian vertex `v` with generators `m1..mN`.
pub fn single_abelian_vertex(rank: usize) -> GraphOfGroups {
    let mut g = GraphOfGroups::new();
    g.add_vertex(vid("v"), GroupHandle::abelian(rank));
    g
}

/// One closed-surface vertex `v` with the standard generators.
pub fn single_surface_vertex(sig: SurfaceSig) -> GraphOfGroups {
    let mut g = GraphOfGroups::new();
    g.add_vertex(vid("v"), GroupHandle::surface(sig));
    g
}

/// The double `F(x,y) ∗_{aw = ow} F(u,v)` over a single tree edge `e`.
pub fn double_free(x: &str, y: &str, u: &str, v: &str, aw: &Word, ow: &Word) -> GraphOfGroups {
    let mut g = GraphOfGroups::new();
    g.add_vertex(vid("a"), GroupHandle::free_named(vec![sym(x), sym(y)]));
    g.add_vertex(vid("b"), GroupHandle::free_named(vec![sym(u), sym(v)]));
    g.add_edge(eid("e"), edge("a", "b", vec![aw.clone()], vec![ow.clone()], true));
    g
}

/// The standard double `⟨x,y,u,v | x²y³ = u²v³⟩`.
pub fn double_xy_uv() -> GraphOfGroups {
    double_free("x", "y", "u", "v", &word("x^2 y^3"), &word("u^2 v^3"))
}

/// The HNN extension `⟨x, t | t x t⁻¹ = x⟩ ≅ Z²`, the standard control
/// that is not 2-acylindrical.
pub fn hnn_z2() -> GraphOfGroups {
    let mut g = GraphOfGroups::new();
    g.add_vertex(vid("v"), GroupHandle::free_named(vec![sym("x")]));
    g.add_edge(eid("e"), edge("v", "v", vec![word("x")], vec![word("x")], false));
    g
}

/// Centralizer extension `⟨x, y, t | [t, x]⟩` of `F(x,y)`: a loop whose
/// boundary images agree pointwise on `⟨x⟩`.
pub fn centralizer_extension() -> GraphOfGroups {
    let mut g = GraphOfGroups::new();
    g.add_vertex(vid("v"), GroupHandle::free_named(vec![sym("x"), sym("y")]));
    g.add_edge(eid("e"), edge("v", "v", vec![word("x")], vec![word("x")], false));
    g
}

/// Star with abelian center: `⟨m1, m2, x, y | [m1,m2], m1 = x²y³⟩`.
pub fn star_abelian_center() -> GraphOfGroups {
    let mut g = GraphOfGroups::new();
    g.add_vertex(vid("m"), GroupHandle::abelian_named(vec![sym("m1"), sym("m2")]));
    g.add_vertex(vid("a"), GroupHandle::free_named(vec![sym("x"), sym("y")]));
    g.add_edge(eid("e"), edge("m", "a", vec![word("m1")], vec![word("x^2 y^3")], true));
    g
}

/// The normalized form of the double: an elementary vertex `z = ⟨m⟩`
/// between the two free vertices.
pub fn normalized_double() -> GraphOfGroups {
    let mut g = GraphOfGroups::new();
    g.add_vertex(vid("z"), GroupHandle::abelian_named(vec![sym("m")]));
    g.add_vertex(vid("a"), GroupHandle::free_named(vec![sym("x"), sym("y")]));
    g.add_vertex(vid("b"), GroupHandle::free_named(vec![sym("u"), sym("v")]));
    g.add_edge(eid("e"), edge("z", "a", vec![word("m")], vec![word("x^2 y^3")], true));
    g.add_edge(eid("f"), edge("z", "b", vec![word("m")], vec![word("u^2 v^3")], true));
    g
}

/// Two parallel edges between two free vertices; `e` in the tree, `f` not.
pub fn theta_graph() -> GraphOfGroups {
    let mut g = GraphOfGroups::new();
    g.add_vertex(vid("a"), GroupHandle::free_named(vec![sym("x")]));
    g.add_vertex(vid("b"), GroupHandle::free_named(vec![sym("u")]));
    g.add_edge(eid("e"), edge("a", "b", vec![word("x^2")], vec![word("u^2")], true));
    g.add_edge(eid("f"), edge("a", "b", vec![word("x^2")], vec![word("u^2")], false));
    g
}

/// A star whose single leaf is a once-punctured torus glued along its
/// boundary word.
pub fn surface_leaf_star() -> GraphOfGroups {
    let sig = SurfaceSig::new(true, 1, 1);
    let gens = vec![sym("p"), sym("s1"), sym("s2")];
    let mut g = GraphOfGroups::new();
    g.add_vertex(vid("z"), GroupHandle::abelian_named(vec![sym("m")]));
    g.add_vertex(vid("q"), GroupHandle::surface_named(sig, gens).unwrap());
    g.add_edge(eid("e"), edge("z", "q", vec![word("m")], vec![word("p")], true));
    g
}
