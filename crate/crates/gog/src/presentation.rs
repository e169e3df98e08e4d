//! Finite presentations and homomorphism candidates between them.

use crate::error::GogError;
use crate::word::{Sym, Word};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub gens: Vec<Sym>,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn free(gens: Vec<Sym>) -> Presentation {
        Presentation { gens, relators: Vec::new() }
    }

    pub fn has_gen(&self, s: &Sym) -> bool {
        self.gens.contains(s)
    }

    pub fn check_word(&self, w: &Word) -> Result<(), GogError> {
        for l in w.letters() {
            if !self.has_gen(&l.sym) {
                return Err(GogError::UnknownGenerator(l.sym.to_string()));
            }
        }
        Ok(())
    }

    /// Exponent-sum vector of `w` over the generator list.
    pub fn abelianized(&self, w: &Word) -> Vec<i64> {
        self.gens.iter().map(|g| w.exponent_sum(g)).collect()
    }
}

/// Verification state of a [`GroupMap`]. Upgrades only ever flow from
/// `Unchecked` towards `VerifiedIso`; the word-problem module performs the
/// checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MapStatus {
    Unchecked,
    VerifiedHom,
    VerifiedIso,
}

/// A homomorphism candidate as a generator-to-word assignment, with an
/// optional candidate inverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupMap {
    pub source: Presentation,
    pub target: Presentation,
    pub forward: BTreeMap<Sym, Word>,
    pub backward: Option<BTreeMap<Sym, Word>>,
    pub status: MapStatus,
}

impl GroupMap {
    pub fn new(source: Presentation, target: Presentation, forward: BTreeMap<Sym, Word>) -> GroupMap {
        GroupMap { source, target, forward, backward: None, status: MapStatus::Unchecked }
    }

    pub fn with_backward(mut self, backward: BTreeMap<Sym, Word>) -> GroupMap {
        self.backward = Some(backward);
        self
    }

    pub fn identity(p: &Presentation) -> GroupMap {
        let map: BTreeMap<Sym, Word> =
            p.gens.iter().map(|g| (g.clone(), Word::gen(g.clone()))).collect();
        GroupMap {
            source: p.clone(),
            target: p.clone(),
            forward: map.clone(),
            backward: Some(map),
            status: MapStatus::Unchecked,
        }
    }

    pub fn apply(&self, w: &Word) -> Result<Word, GogError> {
        w.substitute(&|s: &Sym| self.forward.get(s).cloned())
    }

    pub fn apply_backward(&self, w: &Word) -> Result<Word, GogError> {
        let back = self
            .backward
            .as_ref()
            .ok_or_else(|| GogError::domain("map has no backward assignment"))?;
        w.substitute(&|s: &Sym| back.get(s).cloned())
    }

    /// Composition `other ∘ self` (apply `self` first). Backward maps
    /// compose in the opposite order when both are present.
    pub fn compose(&self, other: &GroupMap) -> Result<GroupMap, GogError> {
        let mut forward = BTreeMap::new();
        for g in &self.source.gens {
            let once = self.apply(&Word::gen(g.clone()))?;
            forward.insert(g.clone(), other.apply(&once)?);
        }
        let backward = match (&self.backward, &other.backward) {
            (Some(_), Some(ob)) => {
                let mut back = BTreeMap::new();
                for h in &other.target.gens {
                    let once = ob.get(h).cloned().ok_or_else(|| {
                        GogError::domain(format!("backward map misses generator {h}"))
                    })?;
                    back.insert(h.clone(), self.apply_backward(&once)?);
                }
                Some(back)
            }
            _ => None,
        };
        Ok(GroupMap {
            source: self.source.clone(),
            target: other.target.clone(),
            forward,
            backward,
            status: MapStatus::Unchecked,
        })
    }

    /// Swaps forward and backward assignments.
    pub fn inverse(&self) -> Result<GroupMap, GogError> {
        let backward = self
            .backward
            .clone()
            .ok_or_else(|| GogError::domain("map has no backward assignment"))?;
        Ok(GroupMap {
            source: self.target.clone(),
            target: self.source.clone(),
            forward: backward,
            backward: Some(self.forward.clone()),
            status: if self.status == MapStatus::VerifiedIso {
                MapStatus::VerifiedIso
            } else {
                MapStatus::Unchecked
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{sym, word};

    fn f2() -> Presentation {
        Presentation::free(vec![sym("x"), sym("y")])
    }

    #[test]
    fn identity_applies_trivially() {
        let id = GroupMap::identity(&f2());
        let w = word("x y^-1 x");
        assert_eq!(id.apply(&w).unwrap(), w);
    }

    #[test]
    fn composition_substitutes() {
        let p = f2();
        let mut fwd = BTreeMap::new();
        fwd.insert(sym("x"), word("x y"));
        fwd.insert(sym("y"), word("y"));
        let f = GroupMap::new(p.clone(), p.clone(), fwd);
        let ff = f.compose(&f).unwrap();
        assert_eq!(ff.apply(&word("x")).unwrap(), word("x y^2"));
    }

    #[test]
    fn abelianization_vector() {
        let p = f2();
        assert_eq!(p.abelianized(&word("x^2 y^-1 x")), vec![3, -1]);
    }
}
