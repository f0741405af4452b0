/// Bitset over `0..len` with uniform selection of the `k`-th surviving index.
///
/// A Fenwick tree over per-word popcounts makes both removal and selection
/// logarithmic in the number of words.
pub(crate) struct Survivors {
    bits: Vec<u64>,
    tree: Vec<u32>,
    count: u64,
}

impl Survivors {
    pub(crate) fn full(len: u64) -> Self {
        let words = (len.div_ceil(64)).max(1) as usize;
        let mut bits = vec![u64::MAX; words];
        let tail = len % 64;
        if tail != 0 {
            bits[words - 1] = (1u64 << tail) - 1;
        }
        if len == 0 {
            bits[0] = 0;
        }
        let mut tree = vec![0u32; words + 1];
        for (w, &b) in bits.iter().enumerate() {
            tree[w + 1] += b.count_ones();
            let parent = (w + 1) + ((w + 1) & (w + 1).wrapping_neg());
            if parent <= words {
                tree[parent] += tree[w + 1];
            }
        }
        Survivors {
            bits,
            tree,
            count: len,
        }
    }

    pub(crate) fn count(&self) -> u64 {
        self.count
    }

    #[cfg(test)]
    pub(crate) fn contains(&self, i: u64) -> bool {
        self.bits
            .get((i / 64) as usize)
            .is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    /// Clears `i`; indices outside the range or already cleared are ignored.
    #[inline]
    pub(crate) fn remove(&mut self, i: u64) {
        let w = (i / 64) as usize;
        let Some(word) = self.bits.get_mut(w) else {
            return;
        };
        let bit = 1u64 << (i % 64);
        if *word & bit == 0 {
            return;
        }
        *word &= !bit;
        self.count -= 1;
        let mut pos = w + 1;
        while pos < self.tree.len() {
            self.tree[pos] -= 1;
            pos += pos & pos.wrapping_neg();
        }
    }

    /// The `k`-th surviving index in increasing order (`k < count`).
    pub(crate) fn select(&self, k: u64) -> u64 {
        assert!(k < self.count, "select past the last survivor");
        let words = self.bits.len();
        let mut pos = 0usize;
        let mut rem = k as u32;
        let mut step = words.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= words && self.tree[next] <= rem {
                pos = next;
                rem -= self.tree[next];
            }
            step >>= 1;
        }
        let mut word = self.bits[pos];
        for _ in 0..rem {
            word &= word - 1;
        }
        pos as u64 * 64 + word.trailing_zeros() as u64
    }
}
