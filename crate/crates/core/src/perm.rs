//! Permutations, relative ranks and restrictions.
//!
//! A [`Permutation`] is read as a ranking: entry `t` (1-based) is the absolute
//! rank of the item shown at position `t`, and a larger rank is a better item.
//! The relative rank of item `t` is its rank among the first `t` items only;
//! the vector of relative ranks is an inversion table and determines the
//! permutation uniquely.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fenwick::Fenwick;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    ranks: Vec<usize>,
}

impl Permutation {
    /// Validates that `ranks` is a bijection on `1..=n` with `n >= 1`.
    pub fn new(ranks: Vec<usize>) -> Result<Self> {
        let n = ranks.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty ranking".into()));
        }
        let mut seen = vec![false; n + 1];
        for (i, &r) in ranks.iter().enumerate() {
            if r == 0 || r > n {
                return Err(Error::InvalidPermutation(format!(
                    "rank {r} at position {} outside 1..={n}",
                    i + 1
                )));
            }
            if std::mem::replace(&mut seen[r], true) {
                return Err(Error::InvalidPermutation(format!("rank {r} repeated")));
            }
        }
        Ok(Self { ranks })
    }

    pub(crate) fn from_vec_unchecked(ranks: Vec<usize>) -> Self {
        debug_assert!(Self::new(ranks.clone()).is_ok());
        Self { ranks }
    }

    /// # Panics
    /// If `n == 0`.
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "a permutation has at least one item");
        Self {
            ranks: (1..=n).collect(),
        }
    }

    /// Uniformly random permutation of size `n` (Fisher-Yates).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut p = Self::identity(n);
        p.ranks.shuffle(rng);
        p
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn into_ranks(self) -> Vec<usize> {
        self.ranks
    }

    fn check_position(&self, t: usize) -> Result<()> {
        if t == 0 || t > self.len() {
            Err(Error::PositionOutOfRange { t, n: self.len() })
        } else {
            Ok(())
        }
    }

    /// Absolute rank of the item at position `t`.
    pub fn rank(&self, t: usize) -> Result<usize> {
        self.check_position(t)?;
        Ok(self.ranks[t - 1])
    }

    /// `|{i <= t : rank(i) <= rank(t)}|`, in O(t).
    pub fn relative_rank(&self, t: usize) -> Result<usize> {
        self.check_position(t)?;
        let own = self.ranks[t - 1];
        Ok(self.ranks[..t].iter().filter(|&&r| r <= own).count())
    }

    /// All relative ranks in O(n log n).
    pub fn relative_ranks(&self) -> RelativeRankVector {
        let n = self.len();
        let mut seen = Fenwick::new(n);
        let rel = self
            .ranks
            .iter()
            .map(|&r| {
                seen.add(r, 1);
                seen.prefix(r) as usize
            })
            .collect();
        RelativeRankVector { rel }
    }

    /// Decodes an inversion table back into the permutation it came from.
    pub fn from_relative_ranks(rel: &RelativeRankVector) -> Self {
        let n = rel.len();
        let mut free = Fenwick::full(n);
        let mut ranks = vec![0; n];
        // Item t is the rel[t]-th smallest of the ranks not taken by later items.
        for t in (0..n).rev() {
            let r = free.kth(rel.rel[t] as u32);
            free.add(r, -1);
            ranks[t] = r;
        }
        Self { ranks }
    }

    /// Relative order of the first `t` items, as a permutation of size `t`.
    pub fn restrict(&self, t: usize) -> Result<Self> {
        self.check_position(t)?;
        let mut order: Vec<usize> = (0..t).collect();
        order.sort_unstable_by_key(|&i| self.ranks[i]);
        let mut ranks = vec![0; t];
        for (k, &i) in order.iter().enumerate() {
            ranks[i] = k + 1;
        }
        Ok(Self { ranks })
    }

    /// Absolute rank of the `r`-th smallest item among the first `t`.
    ///
    /// `r` is clamped into `1..=t`, so `r > t` reads as `t` and `r < 1` as 1.
    pub fn rho(&self, t: usize, r: i64) -> Result<usize> {
        self.check_position(t)?;
        let k = r.clamp(1, t as i64) as usize;
        let mut prefix = self.ranks[..t].to_vec();
        let (_, kth, _) = prefix.select_nth_unstable(k - 1);
        Ok(*kth)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &r) in self.ranks.iter().enumerate() {
            inv[r - 1] = i + 1;
        }
        Self { ranks: inv }
    }

    /// `self ∘ other`, i.e. `t ↦ self(other(t))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(Self {
            ranks: other.ranks.iter().map(|&r| self.ranks[r - 1]).collect(),
        })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_comma_list(f, &self.ranks)
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(parse_comma_list(s)?)
    }
}

/// Inversion table `{r_t}` with `1 <= r_t <= t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelativeRankVector {
    rel: Vec<usize>,
}

impl RelativeRankVector {
    pub fn new(rel: Vec<usize>) -> Result<Self> {
        if rel.is_empty() {
            return Err(Error::InvalidPermutation(
                "empty relative-rank vector".into(),
            ));
        }
        for (i, &r) in rel.iter().enumerate() {
            let t = i + 1;
            if r == 0 || r > t {
                return Err(Error::RelativeRankOutOfRange { t, r });
            }
        }
        Ok(Self { rel })
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.rel.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.rel
    }

    pub fn get(&self, t: usize) -> Result<usize> {
        if t == 0 || t > self.len() {
            return Err(Error::PositionOutOfRange { t, n: self.len() });
        }
        Ok(self.rel[t - 1])
    }

    pub fn to_permutation(&self) -> Permutation {
        Permutation::from_relative_ranks(self)
    }
}

impl fmt::Display for RelativeRankVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_comma_list(f, &self.rel)
    }
}

fn write_comma_list(f: &mut fmt::Formatter<'_>, values: &[usize]) -> fmt::Result {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

fn parse_comma_list(s: &str) -> Result<Vec<usize>> {
    s.trim()
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("rank {:?}: {e}", tok.trim())))
        })
        .collect()
}

/// Iterator over all permutations of size `n` in lexicographic order.
pub struct Permutations {
    next: Option<Vec<usize>>,
}

pub fn permutations(n: usize) -> Permutations {
    Permutations {
        next: (n >= 1).then(|| (1..=n).collect()),
    }
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_lexicographic(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation { ranks: current })
    }
}

fn next_lexicographic(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v
        .iter()
        .rposition(|&x| x > v[i])
        .expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}
