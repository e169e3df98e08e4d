//! Tunable search bounds. All bounded searches in the crate read their
//! limits from here; `GOG_ISO_BOUNDS=k,L,L_r` overrides the first three.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Ball radius for covering-tree probes.
    pub radius: usize,
    /// Representative word-length bound in coset enumeration.
    pub rep_len: usize,
    /// Generator-image length bound for the default rigid oracle.
    pub rigid_len: usize,
    /// Conjugator length bound for ellipticity searches.
    pub conj_len: usize,
    /// Node budget for brute-force searches.
    pub budget: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { radius: 3, rep_len: 6, rigid_len: 4, conj_len: 8, budget: 2_000_000 }
    }
}

impl Bounds {
    /// Applies a `k,L,L_r` override string (the `GOG_ISO_BOUNDS` format).
    pub fn with_override(mut self, spec: &str) -> Self {
        let parts: Vec<&str> = spec.split(',').collect();
        if let Some(k) = parts.first().and_then(|s| s.trim().parse().ok()) {
            self.radius = k;
        }
        if let Some(l) = parts.get(1).and_then(|s| s.trim().parse().ok()) {
            self.rep_len = l;
        }
        if let Some(lr) = parts.get(2).and_then(|s| s.trim().parse().ok()) {
            self.rigid_len = lr;
        }
        self
    }

    pub fn from_env() -> Self {
        match std::env::var("GOG_ISO_BOUNDS") {
            Ok(spec) => Bounds::default().with_override(&spec),
            Err(_) => Bounds::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_string_parses() {
        let b = Bounds::default().with_override("2,5,3");
        assert_eq!((b.radius, b.rep_len, b.rigid_len), (2, 5, 3));
        let b = Bounds::default().with_override("4");
        assert_eq!(b.radius, 4);
        assert_eq!(b.rep_len, Bounds::default().rep_len);
    }
}
