use std::fmt;

use crate::error::{Error, Result};

pub const MAX_AGENTS: u32 = 20;

/// A set of agents; agent `i` (1-based) is bit `i - 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition(pub u64);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn from_agents<I: IntoIterator<Item = u32>>(agents: I) -> Result<Coalition> {
        let mut bits = 0u64;
        for a in agents {
            if a == 0 || a > MAX_AGENTS {
                return Err(Error::AgentOutOfRange(a));
            }
            bits |= 1 << (a - 1);
        }
        Ok(Coalition(bits))
    }

    /// Panics on agents outside 1..=20.
    pub fn of(agents: &[u32]) -> Coalition {
        Coalition::from_agents(agents.iter().copied()).expect("agent out of range")
    }

    /// {1, ..., n}
    pub fn full(n: u32) -> Coalition {
        Coalition(if n == 0 { 0 } else { (1u64 << n) - 1 })
    }

    pub fn singleton(a: u32) -> Coalition {
        Coalition(1 << (a - 1))
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, a: u32) -> bool {
        (1..=64).contains(&a) && self.0 >> (a - 1) & 1 == 1
    }

    pub fn is_subset(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset(self, other: Coalition) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn union(self, other: Coalition) -> Coalition {
        Coalition(self.0 | other.0)
    }

    pub fn intersection(self, other: Coalition) -> Coalition {
        Coalition(self.0 & other.0)
    }

    pub fn difference(self, other: Coalition) -> Coalition {
        Coalition(self.0 & !other.0)
    }

    pub fn with(self, a: u32) -> Coalition {
        self.union(Coalition::singleton(a))
    }

    pub fn agents(self) -> impl Iterator<Item = u32> {
        let bits = self.0;
        (1..=64u32).filter(move |a| bits >> (a - 1) & 1 == 1)
    }

    /// Key of the canonical order: (popcount, mask).
    pub fn canonical_key(self) -> (u32, u64) {
        (self.len(), self.0)
    }

    /// All subsets of `self`, in canonical order.
    pub fn subsets(self) -> Vec<Coalition> {
        let mut out = Vec::with_capacity(1 << self.len());
        let mut sub = 0u64;
        loop {
            out.push(Coalition(sub));
            if sub == self.0 {
                break;
            }
            sub = (sub.wrapping_sub(self.0)) & self.0;
        }
        out.sort_by_key(|c| c.canonical_key());
        out
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.agents().map(|a| a.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        let c = Coalition::of(&[2, 3]);
        assert_eq!(c.len(), 2);
        assert!(c.contains(3) && !c.contains(1));
        assert_eq!(c.to_string(), "{2,3}");
        assert_eq!(Coalition::EMPTY.to_string(), "∅");
        assert_eq!(Coalition::full(3), Coalition::of(&[1, 2, 3]));
        assert!(Coalition::from_agents([0]).is_err());
        assert!(Coalition::from_agents([21]).is_err());
    }

    #[test]
    fn subsets_are_canonical() {
        let subs = Coalition::of(&[1, 3]).subsets();
        assert_eq!(
            subs,
            vec![
                Coalition::EMPTY,
                Coalition::of(&[1]),
                Coalition::of(&[3]),
                Coalition::of(&[1, 3])
            ]
        );
        assert_eq!(Coalition::full(4).subsets().len(), 16);
    }
}
