//! Surface group signatures and their word problem: Dehn reduction on the
//! quadratic relator for closed hyperbolic surfaces, elimination to a free
//! basis for punctured ones, and exact special cases for the small
//! signatures that are not hyperbolic.

use crate::error::GogError;
use crate::free;
use crate::word::{sym, Letter, Sym, Word};
use serde::{Deserialize, Serialize};

/// Homeomorphism type of a compact surface: orientability, genus, and
/// number of punctures.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct SurfaceSig {
    pub orientable: bool,
    pub genus: usize,
    pub punctures: usize,
}

impl SurfaceSig {
    pub fn new(orientable: bool, genus: usize, punctures: usize) -> SurfaceSig {
        SurfaceSig { orientable, genus, punctures }
    }

    pub fn euler_characteristic(&self) -> i64 {
        let g = self.genus as i64;
        let m = self.punctures as i64;
        if self.orientable {
            2 - 2 * g - m
        } else {
            2 - g - m
        }
    }

    /// Number of standard generators: `p_1..p_m` then handle generators.
    pub fn generator_count(&self) -> usize {
        self.punctures + if self.orientable { 2 * self.genus } else { self.genus }
    }

    /// Rank of the group as a free group, for punctured signatures.
    pub fn free_rank(&self) -> Option<usize> {
        if self.punctures == 0 {
            None
        } else {
            Some(self.generator_count() - 1)
        }
    }

    /// Signatures usable as flexible (QH) vertex groups: the group must not
    /// be trivial, cyclic or Z², so closed surfaces need genus ≥ 2
    /// (orientable) or ≥ 3 (non-orientable), punctured ones free rank ≥ 2.
    pub fn is_admissible_qh(&self) -> bool {
        match self.free_rank() {
            Some(r) => r >= 2,
            None => {
                if self.orientable {
                    self.genus >= 2
                } else {
                    self.genus >= 3
                }
            }
        }
    }

    /// Signatures whose group is torsion-free; the non-orientable closed
    /// cases of genus ≤ 2 and the projective plane carry torsion or fail
    /// to be fully residually free and are rejected as vertex groups.
    pub fn is_supported_vertex(&self) -> bool {
        if !self.orientable && self.punctures == 0 && self.genus <= 2 {
            return false;
        }
        // empty generating data (sphere, disk) is useless as a vertex group
        self.generator_count() > 0 && !(self.orientable && self.genus == 0 && self.punctures < 2)
    }

    /// Default generator names in standard order.
    pub fn default_generators(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        for i in 1..=self.punctures {
            out.push(sym(&format!("p{i}")));
        }
        if self.orientable {
            for j in 1..=self.genus {
                out.push(sym(&format!("a{j}")));
                out.push(sym(&format!("b{j}")));
            }
        } else {
            for j in 1..=self.genus {
                out.push(sym(&format!("v{j}")));
            }
        }
        out
    }

    /// The defining relator `p_1…p_m [a_1,b_1]…[a_g,b_g]` or
    /// `p_1…p_m v_1²…v_g²` over the given generator names.
    pub fn relator(&self, gens: &[Sym]) -> Word {
        assert_eq!(gens.len(), self.generator_count(), "generator count mismatch");
        let mut w = Word::identity();
        for p in &gens[..self.punctures] {
            w = w.mul(&Word::gen(p.clone()));
        }
        w.mul(&self.handle_part(gens))
    }

    fn handle_part(&self, gens: &[Sym]) -> Word {
        let mut w = Word::identity();
        if self.orientable {
            for j in 0..self.genus {
                let a = Word::gen(gens[self.punctures + 2 * j].clone());
                let b = Word::gen(gens[self.punctures + 2 * j + 1].clone());
                w = w.mul(&Word::commutator(&a, &b));
            }
        } else {
            for j in 0..self.genus {
                let v = Word::gen(gens[self.punctures + j].clone());
                w = w.mul(&v).mul(&v);
            }
        }
        w
    }

    /// Recognizes a standard surface presentation: generators in standard
    /// order with the single defining relator (up to inversion).
    pub fn recognize(gens: &[Sym], relators: &[Word]) -> Option<SurfaceSig> {
        if relators.len() != 1 {
            return None;
        }
        for orientable in [true, false] {
            for punctures in 0..=gens.len() {
                let rest = gens.len() - punctures;
                let genus = if orientable {
                    if rest % 2 != 0 {
                        continue;
                    }
                    rest / 2
                } else {
                    rest
                };
                let sig = SurfaceSig::new(orientable, genus, punctures);
                let r = sig.relator(gens);
                if relators[0] == r || relators[0] == r.inverse() {
                    return Some(sig);
                }
            }
        }
        None
    }

    /// Peripheral generators (one per puncture).
    pub fn peripheral_gens<'a>(&self, gens: &'a [Sym]) -> &'a [Sym] {
        &gens[..self.punctures]
    }

    /// For punctured surfaces: rewrite onto the free basis obtained by
    /// eliminating the last peripheral generator through the relator.
    pub fn eliminate(&self, gens: &[Sym], w: &Word) -> Word {
        assert!(self.punctures > 0);
        let m = self.punctures;
        let last = gens[m - 1].clone();
        // p_1…p_m Q = 1  ⟹  p_m = (p_1…p_{m-1})⁻¹ Q⁻¹
        let mut head = Word::identity();
        for p in &gens[..m - 1] {
            head = head.mul(&Word::gen(p.clone()));
        }
        let replacement = head.inverse().mul(&self.handle_part(gens).inverse());
        w.substitute(&|s: &Sym| {
            if *s == last {
                Some(replacement.clone())
            } else {
                Some(Word::gen(s.clone()))
            }
        })
        .expect("total substitution")
    }

    /// Exact triviality test for a word over the standard generators.
    pub fn is_trivial(&self, gens: &[Sym], w: &Word) -> Result<bool, GogError> {
        for l in w.letters() {
            if !gens.contains(&l.sym) {
                return Err(GogError::UnknownGenerator(l.sym.to_string()));
            }
        }
        if self.punctures > 0 {
            return Ok(self.eliminate(gens, w).is_empty());
        }
        match (self.orientable, self.genus) {
            (true, 0) => Ok(true),       // sphere: trivial group
            (true, 1) => Ok(torus_trivial(gens, w)),
            (false, 1) => Err(GogError::Unsupported("projective plane has torsion".into())),
            (false, 2) => Ok(klein_bottle_trivial(gens, w)),
            _ => Ok(self.closed_hyperbolic_trivial(gens, w)),
        }
    }

    /// Dehn's greedy reduction, then an exact splitting of the closed
    /// surface into an amalgam of free groups over the boundary word for
    /// the words Dehn reduction alone does not settle.
    fn closed_hyperbolic_trivial(&self, gens: &[Sym], w: &Word) -> bool {
        let relator = self.relator(gens);
        let reduced = dehn_reduce(&relator, w);
        if reduced.is_empty() {
            return true;
        }
        let (left, c_left, c_right) = self.splitting(gens);
        amalgam_trivial(&reduced, &left, &c_left, &c_right)
    }

    /// Splits the closed surface group along the separating curve reading
    /// the first handle: `F(left) ∗_{c_left = c_right} F(rest)`.
    fn splitting(&self, gens: &[Sym]) -> (Vec<Sym>, Word, Word) {
        if self.orientable {
            let left = gens[..2].to_vec();
            let a = Word::gen(gens[0].clone());
            let b = Word::gen(gens[1].clone());
            let c_left = Word::commutator(&a, &b);
            let tail = SurfaceSig::new(true, self.genus - 1, 0);
            let c_right = tail.handle_part(&gens[2..]).inverse();
            (left, c_left, c_right)
        } else {
            let left = gens[..1].to_vec();
            let v = Word::gen(gens[0].clone());
            let c_left = v.mul(&v);
            let tail = SurfaceSig::new(false, self.genus - 1, 0);
            let c_right = tail.handle_part(&gens[1..]).inverse();
            (left, c_left, c_right)
        }
    }

    /// Bounded root extraction: the shortest `r` found with `r^k = w` in the
    /// surface group, scanning cyclic subwords of the free root. The boolean
    /// reports whether the scan ran without backend errors; the answer is a
    /// best-effort root, exact whenever the true root is a cyclic subword.
    pub fn bounded_root(&self, gens: &[Sym], w: &Word, bound: usize) -> (Word, i64, bool) {
        // free root first: any free-group identity holds in the quotient
        let (fr, fk) = free::root(w);
        let mut clean = true;
        for c in cyclic_subwords(&fr, bound) {
            if c.is_empty() || c.len() >= fr.len() {
                continue;
            }
            let max_k = (w.len() / c.len().max(1) + 2) as i64;
            for k in 2..=max_k {
                for signed in [k, -k] {
                    let test = c.pow(signed).inverse().mul(w);
                    match self.is_trivial(gens, &test) {
                        Ok(true) => {
                            let root = if signed < 0 { c.inverse() } else { c.clone() };
                            return (root, signed.abs(), clean);
                        }
                        Ok(false) => {}
                        Err(_) => clean = false,
                    }
                }
            }
        }
        (fr, fk, clean)
    }
}

fn torus_trivial(gens: &[Sym], w: &Word) -> bool {
    gens.iter().all(|g| w.exponent_sum(g) == 0)
}

/// Klein bottle ⟨v1, v2 | v1²v2²⟩: substitute onto `x = v1 v2`, `y = v1`
/// with `y x y⁻¹ = x⁻¹` and normalize to the unique form `x^m y^n`.
fn klein_bottle_trivial(gens: &[Sym], w: &Word) -> bool {
    let (mut m, mut n) = (0i64, 0i64);
    // atoms: appending y^±1 bumps n; appending x^ε turns into x^{ε·(-1)^n}
    let push_x = |m: &mut i64, n: i64, eps: i64| {
        *m += if n.rem_euclid(2) == 0 { eps } else { -eps };
    };
    for l in w.letters() {
        if l.sym == gens[0] {
            // v1 = y
            n += if l.inv { -1 } else { 1 };
        } else if !l.inv {
            // v2 = y⁻¹ x
            n -= 1;
            push_x(&mut m, n, 1);
        } else {
            // v2⁻¹ = x⁻¹ y
            push_x(&mut m, n, -1);
            n += 1;
        }
    }
    m == 0 && n == 0
}

/// One pass structure of Dehn's algorithm: while the word contains more
/// than half of some cyclic permutation of `r` or `r⁻¹`, replace it by the
/// shorter complement and freely reduce.
pub fn dehn_reduce(relator: &Word, w: &Word) -> Word {
    let shifts = cyclic_shifts(relator);
    let mut current = w.clone();
    'outer: loop {
        let half = relator.len() / 2;
        let letters = current.letters();
        for s in &shifts {
            // longest common prefix of s with any suffix of current
            let sl = s.letters();
            for start in 0..letters.len() {
                let mut k = 0;
                while start + k < letters.len() && k < sl.len() && letters[start + k] == sl[k] {
                    k += 1;
                }
                if k > half {
                    // u = s[..k] appears in current; u = complement⁻¹
                    let complement = Word::reduce(sl[k..].to_vec()).inverse();
                    let mut next: Vec<Letter> = letters[..start].to_vec();
                    next.extend(complement.letters().iter().cloned());
                    next.extend(letters[start + k..].iter().cloned());
                    current = Word::reduce(next);
                    continue 'outer;
                }
            }
        }
        return current;
    }
}

fn cyclic_shifts(r: &Word) -> Vec<Word> {
    let mut out = Vec::new();
    for base in [r.clone(), r.inverse()] {
        let n = base.len();
        for i in 0..n {
            let mut rotated: Vec<Letter> = base.letters()[i..].to_vec();
            rotated.extend_from_slice(&base.letters()[..i]);
            out.push(Word::reduce(rotated));
        }
    }
    out.sort_by_key(|w| w.display());
    out.dedup();
    out
}

fn cyclic_subwords(w: &Word, bound: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let letters = w.letters();
    let n = letters.len();
    if n == 0 {
        return out;
    }
    for start in 0..n {
        for len in 1..=bound.min(n) {
            let mut sub = Vec::new();
            for k in 0..len {
                sub.push(letters[(start + k) % n].clone());
            }
            out.push(Word::reduce(sub));
        }
    }
    out.sort_by_key(|w| (w.len(), w.display()));
    out.dedup();
    out
}

/// Exact triviality in `F(left) ∗ F(rest)` amalgamated over the cyclic
/// subgroups `⟨c_left⟩ = ⟨c_right⟩` (identified as `c_left ↦ c_right`),
/// by alternating-syllable pinch reduction.
fn amalgam_trivial(w: &Word, left: &[Sym], c_left: &Word, c_right: &Word) -> bool {
    #[derive(Clone, Copy, PartialEq)]
    enum Side {
        L,
        R,
    }
    let side_of = |s: &Sym| if left.contains(s) { Side::L } else { Side::R };
    // split into alternating syllables
    let mut syllables: Vec<(Side, Word)> = Vec::new();
    for l in w.letters() {
        let side = side_of(&l.sym);
        let letter_word = Word::reduce([l.clone()]);
        match syllables.last_mut() {
            Some((s, acc)) if *s == side => *acc = acc.mul(&letter_word),
            _ => syllables.push((side, letter_word)),
        }
    }
    loop {
        syllables.retain(|(_, w)| !w.is_empty());
        // merge same-side neighbors
        let mut merged: Vec<(Side, Word)> = Vec::new();
        for (side, w) in syllables.drain(..) {
            match merged.last_mut() {
                Some((s, acc)) if *s == side => {
                    *acc = acc.mul(&w);
                    if acc.is_empty() {
                        merged.pop();
                    }
                }
                _ => merged.push((side, w)),
            }
        }
        syllables = merged;
        if syllables.len() <= 1 {
            return syllables.is_empty();
        }
        // pinch: a syllable in the edge subgroup crosses to the other side
        let mut pinched = false;
        for i in 0..syllables.len() {
            let (side, w) = &syllables[i];
            let (own, other) = match side {
                Side::L => (c_left, c_right),
                Side::R => (c_right, c_left),
            };
            if let Some(k) = free::power_of(w, own) {
                let flipped = match side {
                    Side::L => Side::R,
                    Side::R => Side::L,
                };
                syllables[i] = (flipped, other.pow(k));
                pinched = true;
                break;
            }
        }
        if !pinched {
            return false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::word;

    fn genus2() -> (SurfaceSig, Vec<Sym>) {
        let sig = SurfaceSig::new(true, 2, 0);
        (sig, sig.default_generators())
    }

    #[test]
    fn relator_shapes() {
        let (sig, gens) = genus2();
        assert_eq!(sig.relator(&gens), word("a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1"));
        let sig = SurfaceSig::new(false, 3, 0);
        assert_eq!(sig.relator(&sig.default_generators()), word("v1^2 v2^2 v3^2"));
        let sig = SurfaceSig::new(true, 1, 2);
        assert_eq!(sig.relator(&sig.default_generators()), word("p1 p2 a1 b1 a1^-1 b1^-1"));
    }

    #[test]
    fn admission_rules() {
        assert!(SurfaceSig::new(true, 2, 0).is_admissible_qh());
        assert!(SurfaceSig::new(false, 3, 0).is_admissible_qh());
        assert!(SurfaceSig::new(true, 0, 4).is_admissible_qh());
        assert!(SurfaceSig::new(true, 0, 3).is_admissible_qh());
        // sphere, torus, Klein bottle, projective plane, annulus
        assert!(!SurfaceSig::new(true, 0, 0).is_admissible_qh());
        assert!(!SurfaceSig::new(true, 1, 0).is_admissible_qh());
        assert!(!SurfaceSig::new(false, 2, 0).is_admissible_qh());
        assert!(!SurfaceSig::new(false, 1, 0).is_admissible_qh());
        assert!(!SurfaceSig::new(true, 0, 2).is_admissible_qh());
    }

    #[test]
    fn recognizes_standard_presentations() {
        let (sig, gens) = genus2();
        let r = sig.relator(&gens);
        assert_eq!(SurfaceSig::recognize(&gens, &[r]), Some(sig));
        assert_eq!(SurfaceSig::recognize(&gens, &[word("a1 b1")]), None);
    }

    #[test]
    fn defining_relator_is_trivial() {
        let (sig, gens) = genus2();
        let r = sig.relator(&gens);
        assert!(sig.is_trivial(&gens, &r).unwrap());
        assert!(!sig.is_trivial(&gens, &word("a1")).unwrap());
    }

    #[test]
    fn cyclic_permutation_squared_is_trivial() {
        // two Dehn reduction passes settle the square of a rotated relator
        let (sig, gens) = genus2();
        let r = sig.relator(&gens);
        let mut rotated: Vec<Letter> = r.letters()[3..].to_vec();
        rotated.extend_from_slice(&r.letters()[..3]);
        let rot = Word::reduce(rotated);
        let squared = rot.mul(&rot);
        assert!(sig.is_trivial(&gens, &squared).unwrap());
    }

    #[test]
    fn commutator_of_handles_is_nontrivial() {
        let (sig, gens) = genus2();
        assert!(!sig.is_trivial(&gens, &word("a1 a2 a1^-1 a2^-1")).unwrap());
        // [a1,b1]·[a2,b2]⁻¹ = [a2,b2]⁻² is nontrivial as well
        assert!(!sig
            .is_trivial(&gens, &word("a1 b1 a1^-1 b1^-1 b2 a2 b2^-1 a2^-1"))
            .unwrap());
    }

    #[test]
    fn agreement_with_free_oracle_on_punctured() {
        let sig = SurfaceSig::new(true, 0, 3);
        let gens = sig.default_generators();
        // group is free on p1, p2 after eliminating p3
        assert!(sig.is_trivial(&gens, &word("p1 p2 p3")).unwrap());
        assert!(!sig.is_trivial(&gens, &word("p1 p2")).unwrap());
        assert!(!sig.is_trivial(&gens, &word("p3")).unwrap());
        assert!(sig.is_trivial(&gens, &word("p3 p2^-1 p1^-1 p1 p2 p3^-1")).unwrap());
    }

    #[test]
    fn brute_force_agreement_on_genus_two() {
        // every word of length ≤ 4 over the first two generators, checked
        // against the fact that ⟨a1, b1⟩ embeds as a free subgroup
        let (sig, gens) = genus2();
        let syms = [gens[0].clone(), gens[1].clone()];
        let mut words = vec![Word::identity()];
        for _ in 0..4 {
            let mut next = Vec::new();
            for w in &words {
                for s in &syms {
                    for inv in [false, true] {
                        next.push(w.mul(&Word::reduce([Letter { sym: s.clone(), inv }])));
                    }
                }
            }
            words.extend(next);
            words.sort_by_key(|w| w.display());
            words.dedup();
        }
        for w in words {
            let expect = w.is_empty(); // free subgroup: trivial iff freely trivial
            assert_eq!(sig.is_trivial(&gens, &w).unwrap(), expect, "word {w}");
        }
    }

    #[test]
    fn nonorientable_genus_three_word_problem() {
        let sig = SurfaceSig::new(false, 3, 0);
        let gens = sig.default_generators();
        let r = sig.relator(&gens);
        assert!(sig.is_trivial(&gens, &r).unwrap());
        assert!(!sig.is_trivial(&gens, &word("v1^2")).unwrap());
        assert!(!sig.is_trivial(&gens, &word("v1 v2 v1^-1 v2^-1")).unwrap());
        // conjugate of the relator
        assert!(sig.is_trivial(&gens, &r.conjugate_by(&word("v2 v3"))).unwrap());
    }

    #[test]
    fn klein_bottle_and_torus_tables() {
        let klein = SurfaceSig::new(false, 2, 0);
        let gens = klein.default_generators();
        assert!(klein.is_trivial(&gens, &word("v1^2 v2^2")).unwrap());
        assert!(!klein.is_trivial(&gens, &word("v1 v2 v1^-1 v2^-1")).unwrap());
        assert!(!klein.is_trivial(&gens, &word("v1^2")).unwrap());
        let torus = SurfaceSig::new(true, 1, 0);
        let gens = torus.default_generators();
        assert!(torus.is_trivial(&gens, &word("a1 b1 a1^-1 b1^-1")).unwrap());
        assert!(!torus.is_trivial(&gens, &word("a1 b1")).unwrap());
    }

    #[test]
    fn bounded_root_on_surface_generators() {
        let (sig, gens) = genus2();
        let (r, k, _) = sig.bounded_root(&gens, &word("a1^2"), 6);
        assert_eq!((r, k), (word("a1"), 2));
        let (r, k, _) = sig.bounded_root(&gens, &word("a1"), 6);
        assert_eq!((r, k), (word("a1"), 1));
    }
}
