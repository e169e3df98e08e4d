//! Seeded generation of small splittings for testing: doubles, stars,
//! constellations, abelian and surface degenerate cases, and free-product
//! mixtures. Every generated splitting validates, and amalgamating words
//! are never proper powers.

use crate::free;
use crate::graph::{Edge, EdgeId, GraphOfGroups, VertexId};
use crate::group::GroupHandle;
use crate::surface::SurfaceSig;
use crate::word::{sym, Letter, Sym, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Doubles,
    Stars,
    Constellations,
    Abelian,
    Surfaces,
    Mixed,
}

impl Family {
    pub fn parse(s: &str) -> Option<Family> {
        Some(match s {
            "doubles" => Family::Doubles,
            "stars" => Family::Stars,
            "constellations" => Family::Constellations,
            "abelian" => Family::Abelian,
            "surfaces" => Family::Surfaces,
            "mixed" => Family::Mixed,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Doubles => "doubles",
            Family::Stars => "stars",
            Family::Constellations => "constellations",
            Family::Abelian => "abelian",
            Family::Surfaces => "surfaces",
            Family::Mixed => "mixed",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub seed: u64,
    pub family: Family,
    pub count: usize,
}

/// A random freely reduced word over the given generators that is neither
/// trivial nor a proper power (checked through root extraction).
fn random_root_word(rng: &mut ChaCha8Rng, gens: &[Sym], min_len: usize, max_len: usize) -> Word {
    loop {
        let len = rng.gen_range(min_len..=max_len);
        let mut letters: Vec<Letter> = Vec::new();
        while letters.len() < len {
            let s = gens[rng.gen_range(0..gens.len())].clone();
            let inv = rng.gen_bool(0.5);
            let l = Letter { sym: s, inv };
            if letters.last().is_some_and(|last| last.sym == l.sym && last.inv != l.inv) {
                continue;
            }
            letters.push(l);
        }
        let w = Word::reduce(letters);
        if w.len() != len {
            continue;
        }
        let (_, k) = free::root(&w);
        if k == 1 {
            return w;
        }
    }
}

fn free_vertex(id: &str, rank: usize) -> (VertexId, GroupHandle) {
    let vid = VertexId::new(id).expect("generated ids are valid");
    let gens = (1..=rank).map(|i| sym(&format!("{id}_x{i}"))).collect();
    (vid, GroupHandle::free_named(gens))
}

fn abelian_vertex(id: &str, rank: usize) -> (VertexId, GroupHandle) {
    let vid = VertexId::new(id).expect("generated ids are valid");
    let gens = (1..=rank).map(|i| sym(&format!("{id}_m{i}"))).collect();
    (vid, GroupHandle::abelian_named(gens))
}

fn edge(id: &str, from: &VertexId, to: &VertexId, alpha: Vec<Word>, omega: Vec<Word>, tree: bool) -> (EdgeId, Edge) {
    (
        EdgeId::new(id).expect("generated ids are valid"),
        Edge {
            from: from.clone(),
            to: to.clone(),
            rank: alpha.len(),
            alpha,
            omega,
            tree,
            silver: false,
        },
    )
}

fn make_double(rng: &mut ChaCha8Rng) -> GraphOfGroups {
    let mut g = GraphOfGroups::new();
    let (va, ha) = free_vertex("a", rng.gen_range(2..=3));
    let (vb, hb) = free_vertex("b", rng.gen_range(2..=3));
    let wa = random_root_word(rng, ha.gens(), 2, 6);
    let wb = random_root_word(rng, hb.gens(), 2, 6);
    g.add_vertex(va.clone(), ha);
    g.add_vertex(vb.clone(), hb);
    let (id, e) = edge("e", &va, &vb, vec![wa], vec![wb], true);
    g.add_edge(id, e);
    g
}

fn make_star(rng: &mut ChaCha8Rng) -> GraphOfGroups {
    let mut g = GraphOfGroups::new();
    let center_rank = rng.gen_range(1..=2);
    let (vc, hc) = abelian_vertex("z", center_rank);
    g.add_vertex(vc.clone(), hc.clone());
    let leaves = rng.gen_range(2..=3);
    for i in 0..leaves {
        let name = ["a", "b", "c"][i];
        let (vl, hl) = free_vertex(name, rng.gen_range(2..=3));
        let w = random_root_word(rng, hl.gens(), 2, 5);
        g.add_vertex(vl.clone(), hl);
        // alpha: a basis vector of the center (primitive, injective)
        let mut vector = vec![0i64; center_rank];
        vector[i % center_rank] = 1;
        if center_rank > 1 && rng.gen_bool(0.3) {
            vector[(i + 1) % center_rank] = rng.gen_range(-1..=1);
        }
        let alpha = hc.vector_to_word(&vector);
        let (id, e) = edge(&format!("e{i}"), &vc, &vl, vec![alpha], vec![w], true);
        g.add_edge(id, e);
    }
    g
}

fn make_constellation(rng: &mut ChaCha8Rng) -> GraphOfGroups {
    // two rank-one stars sharing a leaf, with a silver-shaped HNN edge
    // between the centers
    let mut g = GraphOfGroups::new();
    let (vy, hy) = abelian_vertex("y", 1);
    let (vz, hz) = abelian_vertex("z", 1);
    let (va, ha) = free_vertex("a", rng.gen_range(2..=3));
    g.add_vertex(vy.clone(), hy.clone());
    g.add_vertex(vz.clone(), hz.clone());
    g.add_vertex(va.clone(), ha.clone());
    let w1 = random_root_word(rng, ha.gens(), 2, 4);
    let mut w2 = random_root_word(rng, ha.gens(), 2, 4);
    // distinct maximal cyclic subgroups keep the centers independent
    while free::conjugator(&w1, &w2).is_some() || free::conjugator(&w1, &w2.inverse()).is_some() {
        w2 = random_root_word(rng, ha.gens(), 2, 4);
    }
    let m = Word::gen(hy.gens()[0].clone());
    let n = Word::gen(hz.gens()[0].clone());
    let (id, e) = edge("e1", &vy, &va, vec![m.clone()], vec![w1], true);
    g.add_edge(id, e);
    let (id, e) = edge("e2", &vz, &va, vec![n.clone()], vec![w2], true);
    g.add_edge(id, e);
    let (id, e) = edge("s", &vy, &vz, vec![m], vec![n], false);
    g.add_edge(id, e);
    g
}

fn make_abelian(rng: &mut ChaCha8Rng) -> GraphOfGroups {
    let mut g = GraphOfGroups::new();
    let (v, h) = abelian_vertex("z", rng.gen_range(1..=3));
    g.add_vertex(v, h);
    g
}

fn make_surface(rng: &mut ChaCha8Rng) -> GraphOfGroups {
    if rng.gen_bool(0.5) {
        // a closed hyperbolic surface on its own
        let sig = if rng.gen_bool(0.7) {
            SurfaceSig::new(true, rng.gen_range(2..=3), 0)
        } else {
            SurfaceSig::new(false, rng.gen_range(3..=4), 0)
        };
        let mut g = GraphOfGroups::new();
        g.add_vertex(VertexId::new("q").unwrap(), GroupHandle::surface(sig));
        g
    } else {
        // a star with a punctured-surface leaf glued along a boundary word
        let mut g = GraphOfGroups::new();
        let (vz, hz) = abelian_vertex("z", 1);
        let sig = SurfaceSig::new(true, 1, 1);
        let gens = vec![sym("q_p1"), sym("q_a1"), sym("q_b1")];
        let hq = GroupHandle::surface_named(sig, gens).unwrap();
        let vq = VertexId::new("q").unwrap();
        g.add_vertex(vz.clone(), hz.clone());
        g.add_vertex(vq.clone(), hq);
        let m = Word::gen(hz.gens()[0].clone());
        let (id, e) = edge("e1", &vz, &vq, vec![m], vec![Word::gen(sym("q_p1"))], true);
        g.add_edge(id, e);
        g
    }
}

fn make_mixed(rng: &mut ChaCha8Rng) -> GraphOfGroups {
    // a free product of a double-like factor with an abelian factor and
    // possibly a free letter
    let mut g = make_double(rng);
    let (v, h) = abelian_vertex("z", rng.gen_range(2..=3));
    g.add_vertex(v.clone(), h);
    let (id, e) = edge("j", &VertexId::new("a").unwrap(), &v, vec![], vec![], true);
    g.add_edge(id, e);
    if rng.gen_bool(0.5) {
        let (id, mut e) = edge("l", &v, &v, vec![], vec![], false);
        e.rank = 0;
        g.add_edge(id, e);
    }
    g
}

/// Generates `spec.count` splittings; every one validates.
pub fn generate(spec: &CorpusSpec) -> Vec<GraphOfGroups> {
    let mut out = Vec::new();
    for i in 0..spec.count {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(i as u64));
        let g = match spec.family {
            Family::Doubles => make_double(&mut rng),
            Family::Stars => make_star(&mut rng),
            Family::Constellations => make_constellation(&mut rng),
            Family::Abelian => make_abelian(&mut rng),
            Family::Surfaces => make_surface(&mut rng),
            Family::Mixed => make_mixed(&mut rng),
        };
        debug_assert!(g.validate().is_ok(), "generated splittings must validate");
        out.push(g);
    }
    out
}

/// The default acceptance corpus: doubles, stars and constellations.
pub fn acceptance_corpus(seed: u64, per_family: usize) -> Vec<GraphOfGroups> {
    let mut out = Vec::new();
    for family in [Family::Doubles, Family::Stars, Family::Constellations] {
        out.extend(generate(&CorpusSpec { seed, family, count: per_family }));
    }
    out
}
