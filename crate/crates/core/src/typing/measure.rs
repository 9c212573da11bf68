use std::collections::BTreeMap;
use std::fmt;

/// A finite multiset of levels.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Measure {
    counts: BTreeMap<u32, usize>,
}

impl Measure {
    pub fn new() -> Measure {
        Measure::default()
    }

    pub fn singleton(k: u32) -> Measure {
        let mut m = Measure::new();
        m.insert(k);
        m
    }

    pub fn insert(&mut self, k: u32) {
        *self.counts.entry(k).or_default() += 1;
    }

    /// Multiset union.
    pub fn extend(&mut self, other: &Measure) {
        for (&k, &n) in &other.counts {
            *self.counts.entry(k).or_default() += n;
        }
    }

    pub fn len(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, k: u32) -> usize {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    pub fn largest(&self) -> Option<u32> {
        self.counts.keys().next_back().copied()
    }

    /// Elements in ascending order, with repetition.
    pub fn to_vec(&self) -> Vec<u32> {
        self.counts
            .iter()
            .flat_map(|(&k, &n)| std::iter::repeat_n(k, n))
            .collect()
    }

    /// `self` minus `other`, elementwise and truncated at zero.
    pub fn difference(&self, other: &Measure) -> Measure {
        let mut out = Measure::new();
        for (&k, &n) in &self.counts {
            let left = n.saturating_sub(other.count(k));
            if left > 0 {
                out.counts.insert(k, left);
            }
        }
        out
    }
}

impl FromIterator<u32> for Measure {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Measure {
        let mut m = Measure::new();
        for k in iter {
            m.insert(k);
        }
        m
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, k) in self.to_vec().into_iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        f.write_str("}")
    }
}

/// `m1 >_mul m2` in the multiset extension of `>` on naturals.
///
/// With the common part removed, what is left of `m1` must be nonempty and
/// dominate every element left of `m2`. Because the order on naturals is
/// total it suffices to compare maxima.
pub fn multiset_greater(m1: &Measure, m2: &Measure) -> bool {
    let n2 = m1.difference(m2);
    let n1 = m2.difference(m1);
    match (n2.largest(), n1.largest()) {
        (None, _) => false,
        (Some(_), None) => true,
        (Some(a), Some(b)) => b < a,
    }
}
