use rustc_hash::FxHashMap;
use serde_json::{json, Value};

use super::Count;

/// DP state of a partial trapping set at one nice-tree node.
///
/// `i` and `q` are bag-local bitmasks: bit `k` of `q` stands for the `k`-th
/// smallest variable of the bag, bit `k` of `i` for the `k`-th smallest
/// check. `d` counts odd checks that were already forgotten.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DPKey {
    pub i: u64,
    pub q: u64,
    pub d: u32,
}

impl DPKey {
    pub const EMPTY: DPKey = DPKey { i: 0, q: 0, d: 0 };

    pub fn new(i: u64, q: u64, d: u32) -> Self {
        DPKey { i, q, d }
    }
}

/// Smallest size `f` of a partial trapping set with a given key, and the
/// number `g` of such sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DPEntry {
    pub f: u32,
    pub g: Count,
}

/// Sparse table: keys that no nonempty partial trapping set realizes are
/// absent, which stands for `f = +∞, g = 0`.
#[derive(Debug, Clone)]
pub struct DPTable {
    pub(crate) bag_v: Vec<usize>,
    pub(crate) bag_c: Vec<usize>,
    pub(crate) node: usize,
    pub(crate) entries: FxHashMap<DPKey, DPEntry>,
}

impl DPTable {
    pub(crate) fn new(bag_v: Vec<usize>, bag_c: Vec<usize>, node: usize) -> Self {
        DPTable {
            bag_v,
            bag_c,
            node,
            entries: FxHashMap::default(),
        }
    }

    pub fn bag_v(&self) -> &[usize] {
        &self.bag_v
    }

    pub fn bag_c(&self) -> &[usize] {
        &self.bag_c
    }

    /// Index of the nice-tree node this table belongs to.
    pub fn node(&self) -> usize {
        self.node
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &DPKey) -> Option<&DPEntry> {
        self.entries.get(key)
    }

    /// `(f, g)` with absent keys read as `(None, 0)`, i.e. `(+∞, 0)`.
    pub fn lookup(&self, key: &DPKey) -> (Option<u32>, Count) {
        match self.entries.get(key) {
            Some(e) => (Some(e.f), e.g.clone()),
            None => (None, Count::zero()),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DPKey, &DPEntry)> {
        self.entries.iter()
    }

    /// Entries in ascending key order.
    pub fn sorted_entries(&self) -> Vec<(DPKey, &DPEntry)> {
        let mut v: Vec<_> = self.entries.iter().map(|(k, e)| (*k, e)).collect();
        v.sort_unstable_by_key(|(k, _)| *k);
        v
    }

    /// Keeps the smaller `f`; on a tie the counts add.
    pub(crate) fn insert_min(&mut self, key: DPKey, f: u32, g: Count) {
        use std::collections::hash_map::Entry;
        match self.entries.entry(key) {
            Entry::Vacant(slot) => {
                slot.insert(DPEntry { f, g });
            }
            Entry::Occupied(mut slot) => {
                let e = slot.get_mut();
                if f < e.f {
                    *e = DPEntry { f, g };
                } else if f == e.f {
                    e.g.add_assign(&g);
                }
            }
        }
    }

    /// Global check ids of the `i` mask and variable ids of the `q` mask.
    pub fn key_sets(&self, key: &DPKey) -> (Vec<usize>, Vec<usize>) {
        (
            mask_members(key.i, &self.bag_c),
            mask_members(key.q, &self.bag_v),
        )
    }

    /// Debug dump with sorted entries and decimal-string counts.
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .sorted_entries()
            .into_iter()
            .map(|(k, e)| {
                let (i, q) = self.key_sets(&k);
                json!({"I": i, "Q": q, "d": k.d, "f": e.f, "g": e.g.to_string()})
            })
            .collect();
        json!({"bag_v": self.bag_v, "bag_c": self.bag_c, "entries": entries})
    }
}

pub(crate) fn mask_members(mask: u64, bag: &[usize]) -> Vec<usize> {
    bag.iter()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, &x)| x)
        .collect()
}

/// Opens a zero bit at position `p`, shifting higher bits up.
pub(crate) fn insert_zero_bit(x: u64, p: usize) -> u64 {
    let low = (1u64 << p) - 1;
    (x & low) | ((x & !low) << 1)
}

/// Deletes bit `p`, shifting higher bits down.
pub(crate) fn remove_bit(x: u64, p: usize) -> u64 {
    let low = (1u64 << p) - 1;
    (x & low) | ((x >> (p + 1)) << p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_shuffles() {
        assert_eq!(insert_zero_bit(0b1011, 2), 0b10011);
        assert_eq!(remove_bit(0b10011, 2), 0b1011);
        assert_eq!(remove_bit(0b10111, 2), 0b1011);
        assert_eq!(
            insert_zero_bit(u64::MAX >> 1, 62),
            (u64::MAX >> 1) & !(1 << 62) | (1 << 63)
        );
    }

    #[test]
    fn insert_min_ties_add_and_strict_min_replaces() {
        let mut t = DPTable::new(vec![], vec![], 0);
        let k = DPKey::EMPTY;
        t.insert_min(k, 3, Count::from(2));
        t.insert_min(k, 3, Count::from(5));
        assert_eq!(
            t.get(&k).unwrap(),
            &DPEntry {
                f: 3,
                g: Count::from(7)
            }
        );
        t.insert_min(k, 4, Count::from(100));
        assert_eq!(t.get(&k).unwrap().g, Count::from(7));
        t.insert_min(k, 2, Count::from(1));
        assert_eq!(
            t.get(&k).unwrap(),
            &DPEntry {
                f: 2,
                g: Count::from(1)
            }
        );
        assert_eq!(t.lookup(&DPKey::new(1, 0, 0)), (None, Count::zero()));
    }
}
