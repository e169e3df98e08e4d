//! Brute-force isomorphism search between small presentations: enumerate
//! generator images up to a length bound in both directions and keep the
//! first verified pair of mutual inverses. One-sided by construction:
//! exhaustion is evidence of nothing.

use crate::config::Bounds;
use crate::graph::GraphOfGroups;
use crate::group::Tri;
use crate::presentation::{GroupMap, MapStatus};
use crate::word::{Letter, Sym, Word};
use crate::word_problem;
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub enum OracleOutcome {
    Iso(GroupMap),
    /// Searched without success; never a refutation.
    NoEvidence(String),
}

impl OracleOutcome {
    pub fn is_iso(&self) -> bool {
        matches!(self, OracleOutcome::Iso(_))
    }
}

fn words_up_to(gens: &[Sym], max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    let mut layer = vec![Word::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for s in gens {
                for inv in [false, true] {
                    let c = w.mul(&Word::reduce([Letter { sym: s.clone(), inv }]));
                    if c.len() == w.len() + 1 {
                        next.push(c);
                    }
                }
            }
        }
        next.sort_by_key(|w| w.display());
        next.dedup();
        out.extend(next.clone());
        layer = next;
    }
    out.sort_by_key(|w| (w.len(), w.display()));
    out
}

/// Verified-homomorphism assignments source → target with images of length
/// ≤ `len`, honoring `fixed` images, capped by the budget.
fn homomorphisms(
    source: &GraphOfGroups,
    target: &GraphOfGroups,
    len: usize,
    fixed: &BTreeMap<Sym, Word>,
    budget: &mut i64,
    cap: usize,
) -> Vec<GroupMap> {
    let sp = source.fundamental_presentation();
    let tp = target.fundamental_presentation();
    // candidates grouped by length; assignments are walked in order of
    // total image length so short witnesses surface first
    let mut by_len: Vec<Vec<Word>> = vec![vec![Word::identity()]];
    let mut layer = vec![Word::identity()];
    for _ in 1..=len {
        let mut next = Vec::new();
        for w in &layer {
            for s in &tp.gens {
                for inv in [false, true] {
                    let c = w.mul(&Word::reduce([Letter { sym: s.clone(), inv }]));
                    if c.len() == w.len() + 1 {
                        next.push(c);
                    }
                }
            }
        }
        next.sort_by_key(|w| w.display());
        next.dedup();
        by_len.push(next.clone());
        layer = next;
    }
    let free_slots: Vec<Sym> = sp.gens.iter().filter(|g| !fixed.contains_key(*g)).cloned().collect();
    let mut found = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        target: &GraphOfGroups,
        sp: &crate::presentation::Presentation,
        tp: &crate::presentation::Presentation,
        slots: &[Sym],
        by_len: &[Vec<Word>],
        remaining: usize,
        assignment: &mut BTreeMap<Sym, Word>,
        found: &mut Vec<GroupMap>,
        budget: &mut i64,
        cap: usize,
    ) {
        if *budget <= 0 || found.len() >= cap {
            return;
        }
        let Some((slot, rest)) = slots.split_first() else {
            if remaining != 0 {
                return;
            }
            *budget -= 4;
            // necessary for surjectivity: full rank on the abelianization
            let rows: Vec<Vec<i64>> =
                sp.gens.iter().map(|g| tp.abelianized(&assignment[g])).collect();
            if crate::matrix::Mat::from_rows(rows).rank() < tp.gens.len().min(sp.gens.len()) {
                return;
            }
            let map = GroupMap::new(sp.clone(), tp.clone(), assignment.clone());
            for r in &sp.relators {
                let Ok(image) = map.apply(r) else { return };
                match word_problem::is_trivial(target, &image) {
                    Tri::Trivial => {}
                    _ => return,
                }
            }
            found.push(map);
            return;
        };
        for l in 0..=remaining.min(by_len.len() - 1) {
            for c in &by_len[l] {
                *budget -= 1;
                if *budget <= 0 {
                    return;
                }
                assignment.insert(slot.clone(), c.clone());
                rec(target, sp, tp, rest, by_len, remaining - l, assignment, found, budget, cap);
                assignment.remove(slot);
            }
        }
    }
    let mut assignment: BTreeMap<Sym, Word> = fixed.clone();
    for total in 0..=(free_slots.len() * len) {
        rec(
            target,
            &sp,
            &tp,
            &free_slots,
            &by_len,
            total,
            &mut assignment,
            &mut found,
            budget,
            cap,
        );
        if *budget <= 0 || found.len() >= cap {
            break;
        }
    }
    found
}

/// Enumerates generator-image assignments up to length `len` in both
/// directions and returns the first verified pair of mutual inverses.
/// `fixed` pins a partial forward assignment (the extension-search mode).
pub fn brute_iso_oracle(
    source: &GraphOfGroups,
    target: &GraphOfGroups,
    len: usize,
    bounds: &Bounds,
    fixed: &BTreeMap<Sym, Word>,
) -> OracleOutcome {
    let mut fwd_budget = (bounds.budget / 2) as i64;
    let forward = homomorphisms(source, target, len, fixed, &mut fwd_budget, 32);
    if forward.is_empty() {
        return OracleOutcome::NoEvidence(format!(
            "no homomorphism with the pinned images and length ≤ {len}{}",
            if fwd_budget <= 0 { " (budget exhausted)" } else { "" }
        ));
    }
    let mut budget = (bounds.budget / 2) as i64;
    let backward = homomorphisms(target, source, len, &BTreeMap::new(), &mut budget, 32);
    for f in &forward {
        for b in &backward {
            let candidate = f.clone().with_backward(b.forward.clone());
            let (candidate, _) = word_problem::verify_isomorphism(&candidate, source, target);
            if candidate.status == MapStatus::VerifiedIso {
                return OracleOutcome::Iso(candidate);
            }
        }
    }
    OracleOutcome::NoEvidence(format!(
        "no mutually inverse pair among {}×{} verified homomorphisms at length ≤ {len}{}",
        forward.len(),
        backward.len(),
        if budget <= 0 { " (budget exhausted)" } else { "" }
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::*;
    use crate::word::{sym, word};

    fn bounds() -> Bounds {
        Bounds { budget: 400_000, ..Bounds::default() }
    }

    #[test]
    fn rank_one_free_groups_match() {
        let a = single_free_vertex(1);
        let mut b = GraphOfGroups::new();
        b.add_vertex(crate::graph::vid("w"), crate::group::GroupHandle::free_named(vec![sym("y1")]));
        match brute_iso_oracle(&a, &b, 1, &bounds(), &BTreeMap::new()) {
            OracleOutcome::Iso(m) => assert_eq!(m.status, MapStatus::VerifiedIso),
            OracleOutcome::NoEvidence(r) => panic!("{r}"),
        }
    }

    #[test]
    fn relabeled_double_found_at_length_two() {
        let g = double_xy_uv();
        let h = double_free("p", "q", "r", "s", &word("p^2 q^3"), &word("r^2 s^3"));
        assert!(brute_iso_oracle(&g, &h, 2, &bounds(), &BTreeMap::new()).is_iso());
    }

    #[test]
    fn one_sided_on_distinct_abelian_ranks() {
        let a = single_abelian_vertex(2);
        let b = single_abelian_vertex(3);
        match brute_iso_oracle(&a, &b, 2, &bounds(), &BTreeMap::new()) {
            OracleOutcome::NoEvidence(_) => {}
            OracleOutcome::Iso(_) => panic!("Z² and Z³ are not isomorphic"),
        }
    }

    #[test]
    fn pinned_images_restrict_the_search() {
        // pin x ↦ y1² in F(x) vs F(y1): no extension is an isomorphism
        let a = single_free_vertex(1);
        let mut b = GraphOfGroups::new();
        b.add_vertex(crate::graph::vid("w"), crate::group::GroupHandle::free_named(vec![sym("y1")]));
        let mut fixed = BTreeMap::new();
        fixed.insert(sym("x1"), word("y1^2"));
        match brute_iso_oracle(&a, &b, 3, &bounds(), &fixed) {
            OracleOutcome::NoEvidence(_) => {}
            OracleOutcome::Iso(_) => panic!("x ↦ y² is not onto"),
        }
    }
}
