//! Element-level algebra in free groups: roots, powers, conjugacy, and the
//! cyclic-subgroup coset tests that the normal-form machinery leans on.

use crate::word::Word;

/// Maximal root extraction: the unique shortest `r` with `w = r^k`, `k ≥ 1`.
/// Returns `(r, k)`; the identity has root `(1, 1)` by convention.
pub fn root(w: &Word) -> (Word, i64) {
    if w.is_empty() {
        return (Word::identity(), 1);
    }
    let (prefix, core) = w.cyclic_reduce();
    let n = core.len();
    for period in 1..=n {
        if n % period != 0 {
            continue;
        }
        let candidate = Word::reduce(core.letters()[..period].to_vec());
        if candidate.pow((n / period) as i64) == core {
            let r = prefix.mul(&candidate).mul(&prefix.inverse());
            return (r, (n / period) as i64);
        }
    }
    (w.clone(), 1)
}

/// Is `w` a power of `c`? Exact; returns the exponent. Cyclically reduced
/// powers grow linearly, so only a bounded window of exponents can match.
pub fn power_of(w: &Word, c: &Word) -> Option<i64> {
    if c.is_empty() {
        return if w.is_empty() { Some(0) } else { None };
    }
    if w.is_empty() {
        return Some(0);
    }
    let (r, k) = root(c);
    let (s, m) = root(w);
    // w = c^t  ⟺  roots agree (up to inversion) and exponents divide
    if s == r {
        if m % k == 0 {
            return Some(m / k);
        }
        return None;
    }
    if s == r.inverse() {
        if m % k == 0 {
            return Some(-(m / k));
        }
        return None;
    }
    None
}

/// Free-group conjugacy with witness: finds `g` with `g a g⁻¹ = b`.
pub fn conjugator(a: &Word, b: &Word) -> Option<Word> {
    let (pa, ca) = a.cyclic_reduce();
    let (pb, cb) = b.cyclic_reduce();
    if ca.len() != cb.len() {
        return None;
    }
    if ca.is_empty() {
        return Some(Word::identity());
    }
    // b = g a g⁻¹ with g = pb · rot · pa⁻¹ for a cyclic rotation rot of ca
    let n = ca.len();
    for i in 0..n {
        let mut rotated: Vec<_> = ca.letters()[i..].to_vec();
        rotated.extend_from_slice(&ca.letters()[..i]);
        if Word::reduce(rotated) == cb {
            let rot = Word::reduce(ca.letters()[..i].to_vec()).inverse();
            let g = pb.mul(&rot).mul(&pa.inverse());
            debug_assert_eq!(g.mul(a).mul(&g.inverse()), *b);
            return Some(g);
        }
    }
    None
}

/// Is `x ∈ ⟨a⟩·⟨b⟩`? Returns exponents `(s, t)` with `x = a^s b^t`.
/// The scan window accounts for the conjugating prefixes of `a` and `b`;
/// past it, `a^{-s} x` is too long to be any power of `b`.
pub fn in_cyclic_product(x: &Word, a: &Word, b: &Word) -> Option<(i64, i64)> {
    if a.is_empty() {
        return power_of(x, b).map(|t| (0, t));
    }
    let (_, core) = a.cyclic_reduce();
    let core_len = core.len().max(1) as i64;
    let bound_s = (x.len() as i64 + 2 * (a.len() + b.len()) as i64) / core_len + 4;
    for s in 0..=bound_s {
        for s in if s == 0 { vec![0] } else { vec![s, -s] } {
            if let Some(t) = power_of(&a.pow(-s).mul(x), b) {
                return Some((s, t));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::word;

    #[test]
    fn root_of_powers() {
        assert_eq!(root(&word("x^6")), (word("x"), 6));
        assert_eq!(root(&word("x y x y")), (word("x y"), 2));
        assert_eq!(root(&word("x^2 y^3")), (word("x^2 y^3"), 1));
        // conjugated power
        let w = word("a x x a^-1");
        assert_eq!(root(&w), (word("a x a^-1"), 2));
    }

    #[test]
    fn root_by_exhaustive_subword_check() {
        // every subword r of w=a^2 with r^k = w: only a itself
        let w = word("a^2");
        let (r, k) = root(&w);
        assert_eq!((r, k), (word("a"), 2));
    }

    #[test]
    fn power_detection() {
        assert_eq!(power_of(&word("x^4"), &word("x^2")), Some(2));
        assert_eq!(power_of(&word("x^3"), &word("x^2")), None);
        assert_eq!(power_of(&word("x^-4"), &word("x^2")), Some(-2));
        assert_eq!(power_of(&word("1"), &word("x")), Some(0));
        assert_eq!(power_of(&word("x y"), &word("x")), None);
        let c = word("x^2 y^3");
        assert_eq!(power_of(&c.pow(5), &c), Some(5));
    }

    #[test]
    fn conjugacy_with_witness() {
        let a = word("x y");
        let b = word("y x");
        let g = conjugator(&a, &b).unwrap();
        assert_eq!(g.mul(&a).mul(&g.inverse()), b);
        assert!(conjugator(&word("x"), &word("y")).is_none());
        assert!(conjugator(&word("x"), &word("x^2")).is_none());
    }

    #[test]
    fn cyclic_product_membership() {
        let (s, t) = in_cyclic_product(&Word::identity(), &word("a"), &word("b")).unwrap();
        assert_eq!((s, t), (0, 0));
        // a^2 b^-3 ∈ ⟨a⟩·⟨b⟩
        assert_eq!(in_cyclic_product(&word("a^2 b^-3"), &word("a"), &word("b")), Some((2, -3)));
        // words involving another generator are outside
        assert!(in_cyclic_product(&word("c"), &word("a"), &word("b")).is_none());
        // a b a is not in ⟨a⟩⟨b⟩
        assert!(in_cyclic_product(&word("a b a"), &word("a"), &word("b")).is_none());
        // conjugated generators in the subgroups
        let a = word("c a c^-1");
        assert!(in_cyclic_product(&a.pow(2).mul(&word("b^5")), &a, &word("b")).is_some());
    }
}
