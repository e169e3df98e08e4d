//! Vertex group handles: a group given as a class descriptor with named
//! generators, plus the element-level operations each class supports.

use crate::error::GogError;
use crate::free;
use crate::presentation::Presentation;
use crate::surface::SurfaceSig;
use crate::word::{sym, Letter, Sym, Word};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Three-valued answer for semi-decidable questions. `Unknown` carries the
/// reason for the abstention and is never silently collapsed to a boolean.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tri {
    Trivial,
    NonTrivial,
    Unknown(String),
}

impl Tri {
    pub fn is_trivial(&self) -> bool {
        matches!(self, Tri::Trivial)
    }

    pub fn is_nontrivial(&self) -> bool {
        matches!(self, Tri::NonTrivial)
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Tri::Unknown(_))
    }

    pub fn from_bool(b: bool) -> Tri {
        if b {
            Tri::Trivial
        } else {
            Tri::NonTrivial
        }
    }
}

/// Word-problem strategy for rigid vertex groups.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Strategy {
    /// No relators; elements are free words.
    Free,
    /// Relators make the group free abelian on its generators.
    Abelian,
    /// The presentation is a standard surface presentation.
    Surface,
    /// The group is the fundamental group of a graph of groups over
    /// supported classes; the word problem recurses into it.
    Graph(Box<crate::graph::GraphOfGroups>),
    /// User-supplied decision table: exact on listed words, abstains
    /// elsewhere (except for freely trivial words).
    External(BTreeMap<Word, bool>),
}

impl Strategy {
    pub fn tag(&self) -> &'static str {
        match self {
            Strategy::Free => "free",
            Strategy::Abelian => "abelian",
            Strategy::Surface => "surface",
            Strategy::Graph(_) => "graph",
            Strategy::External(_) => "external",
        }
    }
}

/// Extra data for rigid vertex groups.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidData {
    pub relators: Vec<Word>,
    /// Distinguished peripheral words (images of incident edge groups).
    pub peripherals: Vec<Word>,
    pub strategy: Strategy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GroupClass {
    Free,
    Abelian,
    Surface(SurfaceSig),
    Rigid(RigidData),
}

/// A vertex or edge group: class descriptor plus named generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupHandle {
    gens: Vec<Sym>,
    class: GroupClass,
}

/// Description of a centralizer, per vertex class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Centralizer {
    /// ⟨root⟩ with `element = root^power`.
    Cyclic { root: Word, power: i64 },
    /// The whole (abelian) group.
    WholeGroup,
    /// Bounded search exhausted without an answer.
    Unknown(String),
}

impl GroupHandle {
    pub fn free(rank: usize) -> GroupHandle {
        let gens = (1..=rank).map(|i| sym(&format!("x{i}"))).collect();
        GroupHandle { gens, class: GroupClass::Free }
    }

    pub fn free_named(gens: Vec<Sym>) -> GroupHandle {
        GroupHandle { gens, class: GroupClass::Free }
    }

    pub fn abelian(rank: usize) -> GroupHandle {
        let gens = (1..=rank).map(|i| sym(&format!("m{i}"))).collect();
        GroupHandle { gens, class: GroupClass::Abelian }
    }

    pub fn abelian_named(gens: Vec<Sym>) -> GroupHandle {
        GroupHandle { gens, class: GroupClass::Abelian }
    }

    pub fn surface(sig: SurfaceSig) -> GroupHandle {
        GroupHandle { gens: sig.default_generators(), class: GroupClass::Surface(sig) }
    }

    pub fn surface_named(sig: SurfaceSig, gens: Vec<Sym>) -> Result<GroupHandle, GogError> {
        if gens.len() != sig.generator_count() {
            return Err(GogError::domain(format!(
                "surface signature needs {} generators, got {}",
                sig.generator_count(),
                gens.len()
            )));
        }
        Ok(GroupHandle { gens, class: GroupClass::Surface(sig) })
    }

    pub fn rigid(gens: Vec<Sym>, data: RigidData) -> Result<GroupHandle, GogError> {
        if gens.is_empty() {
            return Err(GogError::domain("rigid presentation needs at least one generator"));
        }
        let handle = GroupHandle { gens, class: GroupClass::Rigid(data) };
        let p = handle.presentation();
        if let GroupClass::Rigid(data) = &handle.class {
            for w in data.relators.iter().chain(&data.peripherals) {
                p.check_word(w)?;
            }
            if matches!(data.strategy, Strategy::Free) && !data.relators.is_empty() {
                return Err(GogError::domain("free strategy on a presentation with relators"));
            }
            if matches!(data.strategy, Strategy::Surface)
                && SurfaceSig::recognize(&handle.gens, &data.relators).is_none()
            {
                return Err(GogError::domain("surface strategy on a non-surface presentation"));
            }
        }
        Ok(handle)
    }

    pub fn gens(&self) -> &[Sym] {
        &self.gens
    }

    pub fn class(&self) -> &GroupClass {
        &self.class
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn is_abelian_class(&self) -> bool {
        matches!(self.class, GroupClass::Abelian)
    }

    /// Rename generators in place (used when a graph namespaces its
    /// vertices); the mapping must be a bijection on symbols.
    pub fn renamed(&self, rename: &BTreeMap<Sym, Sym>) -> GroupHandle {
        let sub = |w: &Word| -> Word {
            w.substitute(&|s: &Sym| Some(Word::gen(rename.get(s).cloned().unwrap_or_else(|| s.clone()))))
                .expect("total rename")
        };
        let gens = self.gens.iter().map(|g| rename.get(g).cloned().unwrap_or_else(|| g.clone())).collect();
        let class = match &self.class {
            GroupClass::Free => GroupClass::Free,
            GroupClass::Abelian => GroupClass::Abelian,
            GroupClass::Surface(sig) => GroupClass::Surface(*sig),
            GroupClass::Rigid(data) => GroupClass::Rigid(RigidData {
                relators: data.relators.iter().map(&sub).collect(),
                peripherals: data.peripherals.iter().map(&sub).collect(),
                strategy: data.strategy.clone(),
            }),
        };
        GroupHandle { gens, class }
    }

    pub fn presentation(&self) -> Presentation {
        let relators = match &self.class {
            GroupClass::Free => Vec::new(),
            GroupClass::Abelian => {
                let mut rels = Vec::new();
                for i in 0..self.gens.len() {
                    for j in i + 1..self.gens.len() {
                        rels.push(Word::commutator(
                            &Word::gen(self.gens[i].clone()),
                            &Word::gen(self.gens[j].clone()),
                        ));
                    }
                }
                rels
            }
            GroupClass::Surface(sig) => vec![sig.relator(&self.gens)],
            GroupClass::Rigid(data) => data.relators.clone(),
        };
        Presentation { gens: self.gens.clone(), relators }
    }

    /// Canonical form of an element word within this vertex group, where
    /// one exists: sorted power form for abelian, free reduction otherwise.
    pub fn normal_form(&self, w: &Word) -> Word {
        match &self.class {
            GroupClass::Abelian => self.vector_to_word(&self.word_to_vector(w)),
            _ => w.clone(),
        }
    }

    /// Exponent vector over the generators (meaningful for abelian handles,
    /// and for abelianization elsewhere).
    pub fn word_to_vector(&self, w: &Word) -> Vec<i64> {
        self.gens.iter().map(|g| w.exponent_sum(g)).collect()
    }

    pub fn vector_to_word(&self, v: &[i64]) -> Word {
        let mut letters = Vec::new();
        for (g, &e) in self.gens.iter().zip(v) {
            for _ in 0..e.unsigned_abs() {
                letters.push(Letter { sym: g.clone(), inv: e < 0 });
            }
        }
        Word::reduce(letters)
    }

    /// Element triviality within the vertex group.
    pub fn is_trivial_elem(&self, w: &Word) -> Tri {
        if let Err(e) = self.presentation().check_word(w) {
            return Tri::Unknown(e.to_string());
        }
        match &self.class {
            GroupClass::Free => Tri::from_bool(w.is_empty()),
            GroupClass::Abelian => Tri::from_bool(self.word_to_vector(w).iter().all(|&x| x == 0)),
            GroupClass::Surface(sig) => match sig.is_trivial(&self.gens, w) {
                Ok(b) => Tri::from_bool(b),
                Err(e) => Tri::Unknown(e.to_string()),
            },
            GroupClass::Rigid(data) => match &data.strategy {
                Strategy::Free => Tri::from_bool(w.is_empty()),
                Strategy::Abelian => {
                    Tri::from_bool(self.word_to_vector(w).iter().all(|&x| x == 0))
                }
                Strategy::Surface => {
                    let sig = SurfaceSig::recognize(&self.gens, &data.relators)
                        .expect("checked at construction");
                    match sig.is_trivial(&self.gens, w) {
                        Ok(b) => Tri::from_bool(b),
                        Err(e) => Tri::Unknown(e.to_string()),
                    }
                }
                Strategy::Graph(g) => crate::word_problem::is_trivial(g, w),
                Strategy::External(table) => {
                    if w.is_empty() {
                        return Tri::Trivial;
                    }
                    match table.get(w) {
                        Some(&b) => Tri::from_bool(b),
                        None => Tri::Unknown(format!("external table has no entry for {w}")),
                    }
                }
            },
        }
    }

    /// Centralizer of a nontrivial element; the whole group when the input
    /// is trivial or the group abelian.
    pub fn centralizer(&self, w: &Word) -> Centralizer {
        match &self.class {
            GroupClass::Abelian => Centralizer::WholeGroup,
            GroupClass::Free => {
                if w.is_empty() {
                    return Centralizer::WholeGroup;
                }
                let (root, power) = free::root(w);
                Centralizer::Cyclic { root, power }
            }
            GroupClass::Surface(sig) => {
                match self.is_trivial_elem(w) {
                    Tri::Trivial => return Centralizer::WholeGroup,
                    Tri::Unknown(r) => return Centralizer::Unknown(r),
                    Tri::NonTrivial => {}
                }
                let (root, power, clean) = sig.bounded_root(&self.gens, w, 6);
                if clean {
                    Centralizer::Cyclic { root, power }
                } else {
                    Centralizer::Unknown("surface root scan hit a backend error".into())
                }
            }
            GroupClass::Rigid(data) => match &data.strategy {
                Strategy::Free => {
                    if w.is_empty() {
                        return Centralizer::WholeGroup;
                    }
                    let (root, power) = free::root(w);
                    Centralizer::Cyclic { root, power }
                }
                Strategy::Abelian => Centralizer::WholeGroup,
                Strategy::Surface => {
                    let sig = SurfaceSig::recognize(&self.gens, &data.relators)
                        .expect("checked at construction");
                    let (root, power, clean) = sig.bounded_root(&self.gens, w, 6);
                    if clean {
                        Centralizer::Cyclic { root, power }
                    } else {
                        Centralizer::Unknown("surface root scan hit a backend error".into())
                    }
                }
                _ => self.bounded_rigid_centralizer(w),
            },
        }
    }

    /// Bounded root search through the backend word problem; exhaustion is
    /// reported, never guessed.
    fn bounded_rigid_centralizer(&self, w: &Word) -> Centralizer {
        if w.is_empty() {
            return Centralizer::WholeGroup;
        }
        let (fr, fk) = free::root(w);
        // try short proper roots via the backend
        for len in 1..fr.len() {
            if fr.len() % len != 0 {
                continue;
            }
            let candidate = Word::reduce(fr.letters()[..len].to_vec());
            let k = (fr.len() / len) as i64;
            let test = candidate.pow(k).inverse().mul(&fr);
            match self.is_trivial_elem(&test) {
                Tri::Trivial => return Centralizer::Cyclic { root: candidate, power: k * fk },
                Tri::NonTrivial => {}
                Tri::Unknown(r) => return Centralizer::Unknown(r),
            }
        }
        Centralizer::Cyclic { root: fr, power: fk }
    }

    /// A short description used in diagnostics.
    pub fn describe(&self) -> String {
        match &self.class {
            GroupClass::Free => format!("free({})", self.rank()),
            GroupClass::Abelian => format!("abelian({})", self.rank()),
            GroupClass::Surface(sig) => format!(
                "surface({} g={} m={})",
                if sig.orientable { "o" } else { "n" },
                sig.genus,
                sig.punctures
            ),
            GroupClass::Rigid(data) => format!("rigid[{}]({})", data.strategy.tag(), self.rank()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::word;

    #[test]
    fn free_centralizer_is_the_root() {
        let f = GroupHandle::free_named(vec![sym("a"), sym("b")]);
        assert_eq!(
            f.centralizer(&word("a^2")),
            Centralizer::Cyclic { root: word("a"), power: 2 }
        );
        assert_eq!(
            f.centralizer(&word("a^2 b^3")),
            Centralizer::Cyclic { root: word("a^2 b^3"), power: 1 }
        );
    }

    #[test]
    fn centralizer_matches_commutation_search_on_random_words() {
        // oracle: everything commuting with w in F2 among short words is a
        // power of the computed root
        use rand::{Rng, SeedableRng};
        let f = GroupHandle::free_named(vec![sym("a"), sym("b")]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let letters = [word("a"), word("a^-1"), word("b"), word("b^-1")];
        for _ in 0..200 {
            let len = rng.gen_range(1..=10);
            let mut w = Word::identity();
            for _ in 0..len {
                w = w.mul(&letters[rng.gen_range(0..4)].clone());
            }
            if w.is_empty() {
                continue;
            }
            let Centralizer::Cyclic { root, power } = f.centralizer(&w) else {
                panic!("free centralizer must be cyclic")
            };
            assert_eq!(root.pow(power), w);
            assert!(power >= 1);
            // every short commuting word is a power of the root
            let mut stack = vec![Word::identity()];
            for _ in 0..4 {
                let mut next = Vec::new();
                for u in &stack {
                    for l in &letters {
                        next.push(u.mul(l));
                    }
                }
                stack.extend(next);
            }
            for u in stack {
                if Word::commutator(&u, &w).is_empty() {
                    assert!(crate::free::power_of(&u, &root).is_some(), "u={u} w={w}");
                }
            }
        }
    }

    #[test]
    fn abelian_centralizer_is_whole_group() {
        let a = GroupHandle::abelian(3);
        assert_eq!(a.centralizer(&word("m1 m2^2")), Centralizer::WholeGroup);
    }

    #[test]
    fn surface_centralizer_of_a_generator() {
        let s = GroupHandle::surface(SurfaceSig::new(true, 2, 0));
        assert_eq!(
            s.centralizer(&word("a1")),
            Centralizer::Cyclic { root: word("a1"), power: 1 }
        );
    }

    #[test]
    fn abelian_normal_form_sorts() {
        let a = GroupHandle::abelian_named(vec![sym("m1"), sym("m2")]);
        assert_eq!(a.normal_form(&word("m2 m1 m2")), word("m1 m2^2"));
        assert!(a.is_trivial_elem(&word("m1 m2 m1^-1 m2^-1")).is_trivial());
    }

    #[test]
    fn external_strategy_abstains_off_table() {
        let mut table = BTreeMap::new();
        table.insert(word("g^2"), false);
        let h = GroupHandle::rigid(
            vec![sym("g")],
            RigidData { relators: vec![], peripherals: vec![], strategy: Strategy::External(table) },
        )
        .unwrap();
        assert!(h.is_trivial_elem(&word("g^2")).is_nontrivial());
        assert!(h.is_trivial_elem(&word("g^3")).is_unknown());
        assert!(h.is_trivial_elem(&word("1")).is_trivial());
    }
}
