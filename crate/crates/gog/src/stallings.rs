//! Folded subgroup graphs for finitely generated subgroups of free groups:
//! membership with basis expressions, intersections, and coset keys.

use crate::word::{Letter, Sym, Word};
use std::collections::{BTreeMap, VecDeque};

/// A folded, core, labeled graph with basepoint recognizing a subgroup of a
/// free group. Canonical up to graph isomorphism for a fixed subgroup.
#[derive(Clone, Debug)]
pub struct SubgroupGraph {
    /// Transitions `(state, letter) -> state`; both directions stored.
    trans: Vec<BTreeMap<Letter, usize>>,
    basepoint: usize,
    /// Geodesic spanning-tree word from the basepoint to each state.
    tree_path: Vec<Word>,
    /// Non-tree edges in canonical order; each contributes one basis element.
    chords: Vec<(usize, Letter, usize)>,
    /// Free basis of the subgroup, aligned with `chords`.
    basis: Vec<Word>,
}

/// Outcome of writing a word in the subgroup basis: indices into
/// [`SubgroupGraph::basis`] with signs.
pub type BasisExpression = Vec<(usize, i64)>;

impl SubgroupGraph {
    /// Builds the folded core graph of `⟨generators⟩`.
    pub fn new(generators: &[Word]) -> SubgroupGraph {
        let mut builder = Builder::default();
        builder.fresh_state(); // basepoint 0
        for g in generators {
            builder.add_loop(g);
        }
        builder.fold();
        builder.finish()
    }

    pub fn state_count(&self) -> usize {
        self.trans.len()
    }

    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_trivial_subgroup(&self) -> bool {
        self.basis.is_empty()
    }

    fn step(&self, state: usize, letter: &Letter) -> Option<usize> {
        self.trans[state].get(letter).copied()
    }

    /// Membership test: on success returns the expression of `w` in the
    /// subgroup basis (re-multiplying the expression yields `w` back).
    pub fn membership(&self, w: &Word) -> Option<BasisExpression> {
        let mut state = self.basepoint;
        let mut expr: BasisExpression = Vec::new();
        for letter in w.letters() {
            let next = self.step(state, letter)?;
            if let Some(idx) = self.chord_index(state, letter, next) {
                push_factor(&mut expr, idx, 1);
            } else if let Some(idx) = self.chord_index(next, &letter.inverse(), state) {
                push_factor(&mut expr, idx, -1);
            }
            state = next;
        }
        if state == self.basepoint {
            Some(expr)
        } else {
            None
        }
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.membership(w).is_some()
    }

    /// Multiplies a basis expression back out to a word.
    pub fn evaluate(&self, expr: &BasisExpression) -> Word {
        let mut out = Word::identity();
        for &(idx, exp) in expr {
            out = out.mul(&self.basis[idx].pow(exp));
        }
        out
    }

    fn chord_index(&self, from: usize, letter: &Letter, to: usize) -> Option<usize> {
        if letter.inv {
            return None; // chords are recorded with positive letters
        }
        self.chords.iter().position(|(f, l, t)| *f == from && l == letter && *t == to)
    }

    /// Pullback: the subgroup graph of the intersection, via the product
    /// automaton restricted to its core at the basepoint pair.
    pub fn intersect(&self, other: &SubgroupGraph) -> SubgroupGraph {
        let mut builder = Builder::default();
        let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let start = (self.basepoint, other.basepoint);
        index.insert(start, builder.fresh_state());
        let mut queue = VecDeque::from([start]);
        while let Some((a, b)) = queue.pop_front() {
            let s = index[&(a, b)];
            let letters: Vec<Letter> = self.trans[a].keys().cloned().collect();
            for letter in letters {
                let (Some(na), Some(nb)) = (self.step(a, &letter), other.step(b, &letter)) else {
                    continue;
                };
                let t = *index.entry((na, nb)).or_insert_with(|| {
                    queue.push_back((na, nb));
                    builder.fresh_state()
                });
                builder.add_edge(s, letter.clone(), t);
            }
        }
        builder.fold(); // already deterministic; folding is a no-op safety net
        builder.finish()
    }

    /// Canonical key for the left coset `w · H`: maximal trace of `w⁻¹`
    /// through the graph plus the untraced reduced suffix. Two words get
    /// equal keys iff they lie in the same left coset.
    pub fn coset_key(&self, w: &Word) -> (usize, Word) {
        let inv = w.inverse();
        let mut state = self.basepoint;
        let mut rest: &[Letter] = inv.letters();
        while let Some((first, tail)) = rest.split_first() {
            match self.step(state, first) {
                Some(next) => {
                    state = next;
                    rest = tail;
                }
                None => break,
            }
        }
        (state, Word::reduce(rest.to_vec()))
    }

    /// Shortest representative of the coset keyed by [`coset_key`].
    pub fn coset_rep(&self, key: &(usize, Word)) -> Word {
        // key traces w⁻¹ = tree_path(state) · suffix
        self.tree_path[key.0].mul(&key.1).inverse()
    }
}

fn push_factor(expr: &mut BasisExpression, idx: usize, sign: i64) {
    if let Some(last) = expr.last_mut() {
        if last.0 == idx {
            last.1 += sign;
            if last.1 == 0 {
                expr.pop();
            }
            return;
        }
    }
    expr.push((idx, sign));
}

#[derive(Default)]
struct Builder {
    parent: Vec<usize>,
    edges: Vec<(usize, Letter, usize)>,
}

impl Builder {
    fn fresh_state(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.parent.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn add_edge(&mut self, from: usize, letter: Letter, to: usize) {
        let letter = if letter.inv {
            self.edges.push((to, letter.inverse(), from));
            return;
        } else {
            letter
        };
        self.edges.push((from, letter, to));
    }

    fn add_loop(&mut self, w: &Word) {
        let mut current = 0usize;
        let n = w.len();
        for (i, letter) in w.letters().iter().enumerate() {
            let next = if i + 1 == n { 0 } else { self.fresh_state() };
            self.add_edge(current, letter.clone(), next);
            current = next;
        }
    }

    /// Stallings folding: identify targets of equal-labeled edges until the
    /// graph is deterministic in both directions.
    fn fold(&mut self) {
        loop {
            let mut seen: BTreeMap<(usize, Letter, bool), usize> = BTreeMap::new();
            let mut merge: Option<(usize, usize)> = None;
            for (f, l, t) in self.edges.clone() {
                let (f, t) = (self.find(f), self.find(t));
                // forward determinism
                if let Some(&prev) = seen.get(&(f, l.clone(), false)) {
                    if prev != t {
                        merge = Some((prev, t));
                        break;
                    }
                } else {
                    seen.insert((f, l.clone(), false), t);
                }
                // backward determinism
                if let Some(&prev) = seen.get(&(t, l.clone(), true)) {
                    if prev != f {
                        merge = Some((prev, f));
                        break;
                    }
                } else {
                    seen.insert((t, l, true), f);
                }
            }
            match merge {
                Some((a, b)) => self.union(a, b),
                None => break,
            }
        }
    }

    fn finish(&mut self) -> SubgroupGraph {
        // collapse to root representatives and dedupe edges
        let mut states: Vec<usize> = Vec::new();
        let mut renumber: BTreeMap<usize, usize> = BTreeMap::new();
        let basepoint_root = self.find(0);
        let mut ordered: Vec<usize> = (0..self.parent.len()).map(|s| self.find(s)).collect();
        ordered.sort_unstable();
        ordered.dedup();
        // basepoint first for stable numbering
        renumber.insert(basepoint_root, 0);
        states.push(basepoint_root);
        for s in ordered {
            if s != basepoint_root {
                renumber.insert(s, states.len());
                states.push(s);
            }
        }
        let mut edge_set: Vec<(usize, Letter, usize)> = self
            .edges
            .clone()
            .into_iter()
            .map(|(f, l, t)| (renumber[&self.find(f)], l, renumber[&self.find(t)]))
            .collect();
        edge_set.sort();
        edge_set.dedup();

        // core: prune valency-one non-basepoint states
        let mut alive = vec![true; states.len()];
        loop {
            let mut degree = vec![0usize; states.len()];
            for (f, _, t) in &edge_set {
                if alive[*f] && alive[*t] {
                    degree[*f] += 1;
                    degree[*t] += 1;
                }
            }
            let victim = (0..states.len()).find(|&s| alive[s] && s != 0 && degree[s] <= 1);
            match victim {
                Some(s) => {
                    alive[s] = false;
                    edge_set.retain(|(f, _, t)| alive[*f] && alive[*t]);
                }
                None => break,
            }
        }
        let mut final_index: BTreeMap<usize, usize> = BTreeMap::new();
        for s in 0..states.len() {
            if alive[s] {
                let n = final_index.len();
                final_index.insert(s, n);
            }
        }
        let mut trans: Vec<BTreeMap<Letter, usize>> = vec![BTreeMap::new(); final_index.len()];
        let mut positive_edges: Vec<(usize, Letter, usize)> = Vec::new();
        for (f, l, t) in &edge_set {
            let (f, t) = (final_index[f], final_index[t]);
            trans[f].insert(l.clone(), t);
            trans[t].insert(l.inverse(), f);
            positive_edges.push((f, l.clone(), t));
        }

        // geodesic spanning tree from the basepoint
        let n = trans.len();
        let mut tree_path: Vec<Option<Word>> = vec![None; n];
        let mut tree_edges: Vec<(usize, Letter, usize)> = Vec::new();
        tree_path[0] = Some(Word::identity());
        let mut queue = VecDeque::from([0usize]);
        while let Some(s) = queue.pop_front() {
            let neighbors: Vec<(Letter, usize)> =
                trans[s].iter().map(|(l, t)| (l.clone(), *t)).collect();
            for (l, t) in neighbors {
                if tree_path[t].is_none() {
                    tree_path[t] =
                        Some(tree_path[s].clone().unwrap().mul(&Word::reduce([l.clone()])));
                    let canonical = if l.inv { (t, l.inverse(), s) } else { (s, l, t) };
                    tree_edges.push(canonical);
                    queue.push_back(t);
                }
            }
        }
        let tree_path: Vec<Word> = tree_path.into_iter().map(|p| p.expect("disconnected")).collect();
        let chords: Vec<(usize, Letter, usize)> = positive_edges
            .into_iter()
            .filter(|e| !tree_edges.contains(e))
            .collect();
        let basis: Vec<Word> = chords
            .iter()
            .map(|(f, l, t)| {
                tree_path[*f].mul(&Word::reduce([l.clone()])).mul(&tree_path[*t].inverse())
            })
            .collect();
        SubgroupGraph { trans, basepoint: 0, tree_path, chords, basis }
    }
}

/// Free-group membership helper: is `w` in `⟨generators⟩`?
pub fn subgroup_contains(generators: &[Word], w: &Word) -> bool {
    SubgroupGraph::new(generators).contains(w)
}

/// Whether `⟨images⟩ = F(alphabet)`, i.e. the images generate the whole
/// ambient free group.
pub fn generates_free_group(images: &[Word], alphabet: &[Sym]) -> bool {
    let graph = SubgroupGraph::new(images);
    alphabet.iter().all(|s| graph.contains(&Word::gen(s.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::word;

    #[test]
    fn folded_graph_of_a2_b() {
        // folding by hand: the b-loop at the basepoint and an a-path of
        // length two closing up; two identifications happen, two states stay
        let g = SubgroupGraph::new(&[word("a^2"), word("b")]);
        assert_eq!(g.state_count(), 2);
        assert_eq!(g.basis().len(), 2);
        assert!(g.contains(&word("a^2")));
        assert!(g.contains(&word("b")));
        assert!(!g.contains(&word("a")));
    }

    #[test]
    fn empty_generating_set() {
        let g = SubgroupGraph::new(&[]);
        assert_eq!(g.state_count(), 1);
        assert!(g.is_trivial_subgroup());
        assert_eq!(g.membership(&Word::identity()), Some(vec![]));
    }

    #[test]
    fn redundant_generator_folds_away() {
        let g = SubgroupGraph::new(&[word("a"), word("a^-1")]);
        assert_eq!(g.basis(), &[word("a")]);
    }

    #[test]
    fn membership_expression_remultiplies() {
        let g = SubgroupGraph::new(&[word("a^2"), word("b")]);
        let expr = g.membership(&word("a^2 b")).unwrap();
        assert_eq!(g.evaluate(&expr), word("a^2 b"));
        let expr = g.membership(&word("b^-1 a^2 b a^-2")).unwrap();
        assert_eq!(g.evaluate(&expr), word("b^-1 a^2 b a^-2"));
        assert_eq!(g.membership(&word("a")), None);
    }

    #[test]
    fn intersection_of_nested_cyclic() {
        let a = SubgroupGraph::new(&[word("a")]);
        let a2 = SubgroupGraph::new(&[word("a^2")]);
        let meet = a.intersect(&a2);
        assert_eq!(meet.basis(), &[word("a^2")]);
    }

    #[test]
    fn intersection_of_disjoint_cyclics_is_trivial() {
        let a = SubgroupGraph::new(&[word("a")]);
        let b = SubgroupGraph::new(&[word("b")]);
        assert!(a.intersect(&b).is_trivial_subgroup());
    }

    #[test]
    fn intersection_product_core_has_no_loop() {
        // the product automaton of ⟨a², b²⟩ and ⟨ab⟩ has no cycle through
        // the basepoint pair
        let g1 = SubgroupGraph::new(&[word("a^2"), word("b^2")]);
        let g2 = SubgroupGraph::new(&[word("a b")]);
        assert!(g1.intersect(&g2).is_trivial_subgroup());
    }

    #[test]
    fn self_intersection_is_identity() {
        let g = SubgroupGraph::new(&[word("a^2"), word("b")]);
        let meet = g.intersect(&g);
        let mut basis: Vec<Word> = meet.basis().to_vec();
        basis.sort_by_key(|w| w.display());
        let mut orig: Vec<Word> = g.basis().to_vec();
        orig.sort_by_key(|w| w.display());
        assert_eq!(basis, orig);
    }

    #[test]
    fn coset_keys_identify_cosets() {
        let g = SubgroupGraph::new(&[word("a^2 b^3")]);
        let w = word("a^2 b^3");
        // w·H = H
        assert_eq!(g.coset_key(&w), g.coset_key(&Word::identity()));
        assert_eq!(g.coset_key(&word("a")), g.coset_key(&word("a^3 b^3")));
        assert_ne!(g.coset_key(&word("a")), g.coset_key(&word("b")));
        // representative lies in the same coset
        let key = g.coset_key(&word("a b a"));
        let rep = g.coset_rep(&key);
        assert_eq!(g.coset_key(&rep), key);
    }

    #[test]
    fn generation_check() {
        use crate::word::sym;
        assert!(generates_free_group(&[word("a b"), word("b")], &[sym("a"), sym("b")]));
        assert!(!generates_free_group(&[word("a^2"), word("b")], &[sym("a"), sym("b")]));
    }
}
