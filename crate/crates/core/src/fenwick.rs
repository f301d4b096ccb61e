//! Binary indexed tree over `1..=n` used for rank counting and k-th selection.

pub(crate) struct Fenwick {
    tree: Vec<u32>,
    top_bit: usize,
}

impl Fenwick {
    pub(crate) fn new(n: usize) -> Self {
        let top_bit = if n == 0 {
            0
        } else {
            1 << (usize::BITS - 1 - n.leading_zeros())
        };
        Self {
            tree: vec![0; n + 1],
            top_bit,
        }
    }

    /// All of `1..=n` present once. Built in O(n).
    pub(crate) fn full(n: usize) -> Self {
        let mut f = Self::new(n);
        for i in 1..=n {
            f.tree[i] += 1;
            let parent = i + (i & i.wrapping_neg());
            if parent <= n {
                f.tree[parent] += f.tree[i];
            }
        }
        f
    }

    pub(crate) fn add(&mut self, mut i: usize, delta: i32) {
        while i < self.tree.len() {
            self.tree[i] = self.tree[i].wrapping_add_signed(delta);
            i += i & i.wrapping_neg();
        }
    }

    /// Number of present values in `1..=i`.
    pub(crate) fn prefix(&self, mut i: usize) -> u32 {
        let mut sum = 0;
        while i > 0 {
            sum += self.tree[i];
            i &= i - 1;
        }
        sum
    }

    /// Smallest value `v` with `prefix(v) >= k`; `k` must be in `1..=count`.
    pub(crate) fn kth(&self, mut k: u32) -> usize {
        let mut pos = 0;
        let mut step = self.top_bit;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] < k {
                pos = next;
                k -= self.tree[next];
            }
            step >>= 1;
        }
        pos + 1
    }
}
