//! Integer partitions: the index set of PBW bases and Young-diagram sums.

use std::cmp::Ordering;

/// Partition with weakly decreasing positive parts. The empty partition is
/// allowed and indexes the generating vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Self {
        assert!(parts.iter().all(|&p| p > 0), "parts must be positive");
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Weight `|λ| = Σ λ_i`.
    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Multiplicity of a given part size.
    pub fn multiplicity(&self, part: u32) -> u32 {
        self.0.iter().filter(|&&p| p == part).count() as u32
    }

    /// New partition with one extra part inserted.
    pub fn with_part(&self, part: u32) -> Partition {
        let mut v = self.0.clone();
        v.push(part);
        Partition::new(v)
    }

    /// New partition with one copy of `part` removed (`None` if absent).
    pub fn without_part(&self, part: u32) -> Option<Partition> {
        let idx = self.0.iter().position(|&p| p == part)?;
        let mut v = self.0.clone();
        v.remove(idx);
        Some(Partition(v))
    }

    /// Part at (1-based row) i, zero when out of range.
    pub fn part(&self, i: usize) -> u32 {
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    /// Conjugate (transposed) partition.
    pub fn conjugate(&self) -> Partition {
        if self.0.is_empty() {
            return Partition::empty();
        }
        let cols = self.0[0] as usize;
        let mut out = Vec::with_capacity(cols);
        for j in 1..=cols {
            out.push(self.0.iter().filter(|&&p| p as usize >= j).count() as u32);
        }
        Partition(out)
    }

    /// Cells (i, j) of the Young diagram, 1-based.
    pub fn cells(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (1..=p).map(move |j| (i as u32 + 1, j)))
    }

    /// Hook length of the cell (i, j): λ_i + λ'_j − i − j + 1.
    pub fn hook(&self, i: u32, j: u32) -> i64 {
        let conj = self.conjugate();
        self.part(i as usize) as i64 + conj.part(j as usize) as i64 - i as i64 - j as i64 + 1
    }
}

// Canonical order: by weight, then lexicographically on the part lists.
impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.weight(), &self.0).cmp(&(other.weight(), &other.0))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of `n` (descending part lists, deterministic order).
pub fn partitions_of(n: u32) -> Vec<Partition> {
    partitions_of_bounded(n, n)
}

/// Partitions of `n` with every part ≤ `max_part`.
pub fn partitions_of_bounded(n: u32, max_part: u32) -> Vec<Partition> {
    fn rec(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(Partition(prefix.clone()));
            return;
        }
        let hi = max.min(n);
        for p in (1..=hi).rev() {
            prefix.push(p);
            rec(n - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    rec(n, max_part, &mut prefix, &mut out);
    out
}

/// All partitions of weight `0..=n` in canonical order.
pub fn partitions_up_to(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    for k in 0..=n {
        let mut layer = partitions_of(k);
        layer.sort();
        out.append(&mut layer);
    }
    out
}

/// Number of partitions of `n`.
pub fn partition_count(n: u32) -> u64 {
    partitions_of(n).len() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_known_values() {
        let expect = [1u64, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for (n, &e) in expect.iter().enumerate() {
            assert_eq!(partition_count(n as u32), e, "p({n})");
        }
    }

    #[test]
    fn conjugate_and_hooks() {
        let p = Partition::new(vec![3, 1]);
        assert_eq!(p.conjugate(), Partition::new(vec![2, 1, 1]));
        assert_eq!(p.hook(1, 1), 4); // 3 + 2 - 1 - 1 + 1
        assert_eq!(p.hook(1, 3), 1);
        assert_eq!(p.weight(), 4);
    }

    #[test]
    fn bounded_parts() {
        // partitions of 4 with parts <= 2: (2,2), (2,1,1), (1,1,1,1)
        assert_eq!(partitions_of_bounded(4, 2).len(), 3);
    }
}
