//! Order-statistics tree keyed by rank rather than by value.
//!
//! A counted B+tree: leaves hold up to [`LEAF_CAP`] items in sequence order,
//! branches hold up to [`BRANCH_CAP`] children together with the number of
//! items below each child. Items have no keys: an item's position in the
//! in-order sequence is its rank, and inserting at rank `k` shifts every item
//! previously at rank `k..` one place to the right.
//!
//! Wide nodes keep the tree three or four levels deep for a million items, so
//! an insertion touches a handful of contiguous nodes instead of one scattered
//! node per binary level. All leaves sit at the same depth and every node but
//! the root is at least half full, which bounds the height by
//! `O(log n / log BRANCH_CAP)`.

use crate::error::{Error, Result};

pub const LEAF_CAP: usize = 64;
pub const BRANCH_CAP: usize = 32;

const NIL: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Leaf<T> {
    len: usize,
    /// Next leaf in sequence order.
    next: u32,
    items: [T; LEAF_CAP],
}

#[derive(Clone, Debug)]
struct Branch {
    len: usize,
    counts: [u32; BRANCH_CAP],
    children: [u32; BRANCH_CAP],
}

/// Node ids below a branch point at leaves when the branch sits on the level
/// just above them and at branches otherwise.
#[derive(Clone, Debug)]
pub struct OrderStatTree<T> {
    leaves: Vec<Leaf<T>>,
    branches: Vec<Branch>,
    root: u32,
    /// Branch levels above the leaves.
    depth: usize,
    len: usize,
}

impl<T: Copy + Default> Default for OrderStatTree<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Copy + Default> OrderStatTree<T> {
    pub fn new() -> Self {
        Self::with_capacity(0)
    }

    pub fn with_capacity(capacity: usize) -> Self {
        let leaves = Vec::with_capacity(1 + capacity / (LEAF_CAP / 2));
        Self {
            leaves,
            branches: Vec::new(),
            root: NIL,
            depth: 0,
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of node levels including the leaves; 0 when empty.
    pub fn height(&self) -> usize {
        if self.root == NIL {
            0
        } else {
            self.depth + 1
        }
    }

    fn new_leaf(&mut self) -> Result<u32> {
        let id = self.leaves.len();
        if id >= NIL as usize {
            return Err(Error::InvalidParameter(
                "order-statistics tree is full".into(),
            ));
        }
        self.leaves.push(Leaf {
            len: 0,
            next: NIL,
            items: [T::default(); LEAF_CAP],
        });
        Ok(id as u32)
    }

    fn new_branch(&mut self) -> Result<u32> {
        let id = self.branches.len();
        if id >= NIL as usize {
            return Err(Error::InvalidParameter(
                "order-statistics tree is full".into(),
            ));
        }
        self.branches.push(Branch {
            len: 0,
            counts: [0; BRANCH_CAP],
            children: [NIL; BRANCH_CAP],
        });
        Ok(id as u32)
    }

    /// Places `item` at 1-based in-order position `rank`, in O(log n).
    pub fn insert_at_rank(&mut self, rank: usize, item: T) -> Result<()> {
        if rank == 0 || rank > self.len + 1 {
            return Err(Error::RankOutOfRange {
                rank,
                max: self.len + 1,
            });
        }
        if self.len >= NIL as usize {
            return Err(Error::InvalidParameter(
                "order-statistics tree is full".into(),
            ));
        }
        if self.root == NIL {
            self.root = self.new_leaf()?;
        }
        let before = self.len;
        if let Some((sibling, sibling_count)) =
            self.insert(self.root, self.depth, rank - 1, item)?
        {
            let top = self.new_branch()?;
            let b = &mut self.branches[top as usize];
            b.len = 2;
            b.children[0] = self.root;
            b.children[1] = sibling;
            b.counts[0] = (before + 1) as u32 - sibling_count;
            b.counts[1] = sibling_count;
            self.root = top;
            self.depth += 1;
        }
        self.len += 1;
        Ok(())
    }

    /// Inserts below `node` at 0-based offset `pos`. On a split, returns the
    /// new right sibling and the number of items under it.
    fn insert(
        &mut self,
        node: u32,
        depth: usize,
        pos: usize,
        item: T,
    ) -> Result<Option<(u32, u32)>> {
        if depth == 0 {
            return self.insert_leaf(node, pos, item);
        }
        let (slot, offset, child) = {
            let b = &mut self.branches[node as usize];
            let mut slot = 0;
            let mut offset = pos;
            // Past the last child only when appending at its end.
            while slot + 1 < b.len && offset > b.counts[slot] as usize {
                offset -= b.counts[slot] as usize;
                slot += 1;
            }
            b.counts[slot] += 1;
            (slot, offset, b.children[slot])
        };
        let Some((sibling, sibling_count)) = self.insert(child, depth - 1, offset, item)? else {
            return Ok(None);
        };
        self.branches[node as usize].counts[slot] -= sibling_count;
        self.insert_child(node, slot + 1, sibling, sibling_count)
    }

    fn insert_leaf(&mut self, node: u32, pos: usize, item: T) -> Result<Option<(u32, u32)>> {
        let leaf = &mut self.leaves[node as usize];
        if leaf.len < LEAF_CAP {
            leaf.items.copy_within(pos..leaf.len, pos + 1);
            leaf.items[pos] = item;
            leaf.len += 1;
            return Ok(None);
        }
        let right = self.new_leaf()?;
        let half = LEAF_CAP / 2;
        {
            let [left, right_leaf] = self
                .leaves
                .get_disjoint_mut([node as usize, right as usize])
                .expect("distinct leaves");
            right_leaf.items[..LEAF_CAP - half].copy_from_slice(&left.items[half..]);
            right_leaf.len = LEAF_CAP - half;
            right_leaf.next = left.next;
            left.len = half;
            left.next = right;
        }
        if pos <= half {
            self.insert_leaf(node, pos, item)?;
        } else {
            self.insert_leaf(right, pos - half, item)?;
        }
        Ok(Some((right, self.leaves[right as usize].len as u32)))
    }

    /// Adds `child` at `slot` of branch `node`, splitting the branch if full.
    fn insert_child(
        &mut self,
        node: u32,
        slot: usize,
        child: u32,
        count: u32,
    ) -> Result<Option<(u32, u32)>> {
        let b = &mut self.branches[node as usize];
        if b.len < BRANCH_CAP {
            b.children.copy_within(slot..b.len, slot + 1);
            b.counts.copy_within(slot..b.len, slot + 1);
            b.children[slot] = child;
            b.counts[slot] = count;
            b.len += 1;
            return Ok(None);
        }
        let right = self.new_branch()?;
        let half = BRANCH_CAP / 2;
        {
            let [left, right_branch] = self
                .branches
                .get_disjoint_mut([node as usize, right as usize])
                .expect("distinct branches");
            right_branch.children[..BRANCH_CAP - half].copy_from_slice(&left.children[half..]);
            right_branch.counts[..BRANCH_CAP - half].copy_from_slice(&left.counts[half..]);
            right_branch.len = BRANCH_CAP - half;
            left.len = half;
        }
        if slot <= half {
            self.insert_child(node, slot, child, count)?;
        } else {
            self.insert_child(right, slot - half, child, count)?;
        }
        let r = &self.branches[right as usize];
        Ok(Some((right, r.counts[..r.len].iter().sum())))
    }

    /// Item at 1-based in-order position `rank`, in O(log n).
    pub fn item_at_rank(&self, rank: usize) -> Result<&T> {
        if rank == 0 || rank > self.len {
            return Err(Error::RankOutOfRange {
                rank,
                max: self.len,
            });
        }
        let mut node = self.root;
        let mut offset = rank - 1;
        for _ in 0..self.depth {
            let b = &self.branches[node as usize];
            let mut slot = 0;
            while offset >= b.counts[slot] as usize {
                offset -= b.counts[slot] as usize;
                slot += 1;
            }
            node = b.children[slot];
        }
        Ok(&self.leaves[node as usize].items[offset])
    }

    /// In-order traversal, O(n).
    pub fn iter(&self) -> Iter<'_, T> {
        // The first leaf ever created stays leftmost: splits add leaves to the right.
        let leaf = if self.root == NIL { NIL } else { 0 };
        Iter {
            tree: self,
            leaf,
            index: 0,
        }
    }

    pub fn to_sequence(&self) -> Vec<T> {
        self.iter().copied().collect()
    }

    /// Recomputes every subtree count and checks it against the stored one,
    /// along with uniform leaf depth, half-full occupancy below the root and
    /// the leaf chain order. Linear time; meant for tests.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.root == NIL {
            return if self.len == 0 {
                Ok(())
            } else {
                Err(format!("empty root but len {}", self.len))
            };
        }
        let mut chain = Vec::new();
        let total = self.check_node(self.root, self.depth, true, &mut chain)?;
        if total != self.len {
            return Err(format!("{total} items reachable, {} stored", self.len));
        }
        let mut leaf = 0u32;
        for (k, &expected) in chain.iter().enumerate() {
            if leaf != expected {
                return Err(format!(
                    "leaf chain position {k}: found {leaf}, expected {expected}"
                ));
            }
            leaf = self.leaves[leaf as usize].next;
        }
        if leaf != NIL {
            return Err("leaf chain runs past the last leaf".into());
        }
        Ok(())
    }

    fn check_node(
        &self,
        node: u32,
        depth: usize,
        is_root: bool,
        chain: &mut Vec<u32>,
    ) -> std::result::Result<usize, String> {
        if depth == 0 {
            let leaf = &self.leaves[node as usize];
            if leaf.len > LEAF_CAP || (!is_root && leaf.len < LEAF_CAP / 2) {
                return Err(format!("leaf {node} holds {} items", leaf.len));
            }
            chain.push(node);
            return Ok(leaf.len);
        }
        let b = &self.branches[node as usize];
        let min = if is_root { 2 } else { BRANCH_CAP / 2 };
        if b.len > BRANCH_CAP || b.len < min {
            return Err(format!("branch {node} has {} children", b.len));
        }
        let mut total = 0;
        for slot in 0..b.len {
            let count = self.check_node(b.children[slot], depth - 1, false, chain)?;
            if count != b.counts[slot] as usize {
                return Err(format!(
                    "branch {node} slot {slot}: stored count {} but subtree has {count}",
                    b.counts[slot]
                ));
            }
            total += count;
        }
        Ok(total)
    }
}

pub struct Iter<'a, T> {
    tree: &'a OrderStatTree<T>,
    leaf: u32,
    index: usize,
}

impl<'a, T> Iterator for Iter<'a, T> {
    type Item = &'a T;

    fn next(&mut self) -> Option<&'a T> {
        while self.leaf != NIL {
            let leaf = &self.tree.leaves[self.leaf as usize];
            if self.index < leaf.len {
                self.index += 1;
                return Some(&leaf.items[self.index - 1]);
            }
            self.leaf = leaf.next;
            self.index = 0;
        }
        None
    }
}
