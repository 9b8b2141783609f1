//! Exact ball censuses in `F_n ⋊ Z^d` and the entropy sandwich: the
//! subadditive upper sequence `ln(B_n)/n` against the certified lower bound
//! `ln(3)/N` from a free-basis verdict.

use std::collections::HashSet;

use thiserror::Error;

use crate::certify::Verdict;
use crate::extension::{ExtElement, ExtError, ExtensionGroup, GeneratingSet};

/// Default cap on enumerated elements across all shells.
pub const DEFAULT_ELEMENT_CAP: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrowthError {
    #[error("element cap {cap} exceeded after completing radius {completed}")]
    ElementCapExceeded {
        cap: usize,
        completed: usize,
        /// Exact counts up to the last fully enumerated radius.
        partial: BallCensus,
    },
    #[error(transparent)]
    Ext(#[from] ExtError),
}

/// Exact cumulative ball sizes `B_0 … B_R` for one generating set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallCensus {
    pub radius: usize,
    /// `counts[n]` is the number of distinct elements of T-length ≤ n.
    pub counts: Vec<u64>,
}

impl BallCensus {
    /// `ln(B_n)/n` for `1 ≤ n ≤ R`.
    pub fn upper_sequence(&self) -> Vec<f64> {
        self.counts
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, &b)| (b as f64).ln() / n as f64)
            .collect()
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("n,B_n,ln(B_n)/n\n");
        for (n, &b) in self.counts.iter().enumerate() {
            let rate = if n == 0 { 0.0 } else { (b as f64).ln() / n as f64 };
            out.push_str(&format!("{n},{b},{rate:.6}\n"));
        }
        out
    }
}

/// Exact breadth-first census of the radius-`radius` ball of `⟨T⟩`,
/// deduplicated by normal form.  On cap overrun the error carries the exact
/// counts up to the last completed shell.
pub fn enumerate_ball(
    group: &ExtensionGroup,
    t: &GeneratingSet,
    radius: usize,
    cap: usize,
) -> Result<BallCensus, GrowthError> {
    let mut steps: Vec<ExtElement> = Vec::new();
    for (_, g) in t.iter() {
        steps.push(g.clone());
        steps.push(group.invert(g)?);
    }
    let mut seen: HashSet<ExtElement> = HashSet::new();
    seen.insert(group.identity());
    let mut counts = vec![1u64];
    let mut frontier = vec![group.identity()];
    for n in 1..=radius {
        let mut next = Vec::new();
        for x in &frontier {
            for s in &steps {
                let y = group.multiply(x, s)?;
                if seen.insert(y.clone()) {
                    if seen.len() > cap {
                        return Err(GrowthError::ElementCapExceeded {
                            cap,
                            completed: n - 1,
                            partial: BallCensus { radius: n - 1, counts },
                        });
                    }
                    next.push(y);
                }
            }
        }
        counts.push(seen.len() as u64);
        if next.is_empty() {
            // Finite closure (never for these groups, but keep counts total).
            counts.resize(radius + 1, seen.len() as u64);
            break;
        }
        frontier = next;
    }
    Ok(BallCensus { radius, counts })
}

/// Upper sequence plus the certified lower bound, when a free-basis verdict
/// supplies one.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthEstimate {
    pub upper_sequence: Vec<f64>,
    pub lower_bound: Option<f64>,
}

pub fn entropy_bounds(
    group: &ExtensionGroup,
    t: &GeneratingSet,
    radius: usize,
    verdict: Option<&Verdict>,
    cap: usize,
) -> Result<(BallCensus, GrowthEstimate), GrowthError> {
    let census = enumerate_ball(group, t, radius, cap)?;
    let lower_bound = match verdict {
        Some(Verdict::FreeBasis(c)) => Some(c.entropy_lower),
        _ => None,
    };
    Ok((census.clone(), GrowthEstimate { upper_sequence: census.upper_sequence(), lower_bound }))
}

/// Outcome of [`subadditivity_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Subadditivity {
    Holds,
    Violation { m: usize, n: usize },
}

/// Checks `B_{m+n} ≤ B_m · B_n` for all admissible pairs; a violation means
/// the enumeration is broken (the sequence must be submultiplicative for the
/// growth limit to exist).
pub fn subadditivity_check(census: &BallCensus) -> Subadditivity {
    for m in 1..census.counts.len() {
        for n in m..census.counts.len() {
            if m + n >= census.counts.len() {
                break;
            }
            let product = u128::from(census.counts[m]) * u128::from(census.counts[n]);
            if u128::from(census.counts[m + n]) > product {
                return Subadditivity::Violation { m, n };
            }
        }
    }
    Subadditivity::Holds
}

/// `B_n = 2·3^n − 1`, the ball size in a rank-2 free group.
pub fn free_rank2_ball(n: u32) -> u64 {
    2 * 3u64.pow(n) - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::FreeAutomorphism;
    use crate::word::Word;

    fn free2() -> (ExtensionGroup, GeneratingSet) {
        // F2 with no abelian part: d = 0.
        let e = ExtensionGroup::new(2, vec![]).unwrap();
        let t = GeneratingSet::new(vec![
            ("a".into(), e.element(Word::parse("a", 2).unwrap(), vec![]).unwrap()),
            ("b".into(), e.element(Word::parse("b", 2).unwrap(), vec![]).unwrap()),
        ])
        .unwrap();
        (e, t)
    }

    #[test]
    fn free_group_ball_counts() {
        let (e, t) = free2();
        let census = enumerate_ball(&e, &t, 5, DEFAULT_ELEMENT_CAP).unwrap();
        assert_eq!(census.counts[..3], [1, 5, 17]);
        for (n, &b) in census.counts.iter().enumerate() {
            assert_eq!(b, free_rank2_ball(n as u32));
        }
        assert_eq!(subadditivity_check(&census), Subadditivity::Holds);
    }

    #[test]
    fn lattice_ball_counts() {
        // Z^2: rank-0 kernel, two trivial automorphisms.
        let id = FreeAutomorphism::identity(0);
        let e = ExtensionGroup::new(0, vec![id.clone(), id]).unwrap();
        let t = GeneratingSet::new(vec![
            ("s".into(), e.element(Word::identity(0), vec![1, 0]).unwrap()),
            ("t".into(), e.element(Word::identity(0), vec![0, 1]).unwrap()),
        ])
        .unwrap();
        let census = enumerate_ball(&e, &t, 3, DEFAULT_ELEMENT_CAP).unwrap();
        assert_eq!(census.counts, vec![1, 5, 13, 25]);
        for (n, &b) in census.counts.iter().enumerate() {
            let n = n as u64;
            assert_eq!(b, 2 * n * n + 2 * n + 1);
        }
        assert_eq!(subadditivity_check(&census), Subadditivity::Holds);
    }

    #[test]
    fn radius_zero_census() {
        let (e, t) = free2();
        let census = enumerate_ball(&e, &t, 0, DEFAULT_ELEMENT_CAP).unwrap();
        assert_eq!(census.counts, vec![1]);
        assert_eq!(subadditivity_check(&census), Subadditivity::Holds);
    }

    #[test]
    fn cap_overrun_returns_partial_counts() {
        let (e, t) = free2();
        let err = enumerate_ball(&e, &t, 4, 20).unwrap_err();
        match err {
            GrowthError::ElementCapExceeded { completed, partial, .. } => {
                assert_eq!(completed, 2);
                assert_eq!(partial.counts, vec![1, 5, 17]);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn upper_sequence_and_lower_bound() {
        let (e, t) = free2();
        let (census, est) = entropy_bounds(&e, &t, 6, None, DEFAULT_ELEMENT_CAP).unwrap();
        assert_eq!(est.lower_bound, None);
        // ln(2·3^n − 1)/n decreases toward ln 3 from above.
        let ln3 = 3f64.ln();
        for (i, &u) in est.upper_sequence.iter().enumerate() {
            assert!(u > ln3, "entry {i} = {u} should exceed ln 3");
            if i > 0 {
                assert!(u < est.upper_sequence[i - 1]);
            }
        }
        assert_eq!(census.upper_sequence().len(), 6);
    }
}
