/// Fixed-length bitmap backing one level (or one level cell) of a set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Bits {
    words: Vec<u64>,
    len: u64,
}

impl Bits {
    pub fn new(len: u64) -> Self {
        Bits { words: vec![0; len.div_ceil(64) as usize], len }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn get(&self, i: u64) -> bool {
        i < self.len && self.words[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: u64) {
        debug_assert!(i < self.len);
        self.words[(i / 64) as usize] |= 1 << (i % 64);
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Set positions in `[lo, hi)`, ascending.
    pub fn ones_in(&self, lo: u64, hi: u64) -> impl Iterator<Item = u64> + '_ {
        let hi = hi.min(self.len);
        let mut i = lo;
        std::iter::from_fn(move || {
            while i < hi {
                let word = self.words[(i / 64) as usize] >> (i % 64);
                if word == 0 {
                    i = (i / 64 + 1) * 64;
                    continue;
                }
                let pos = i + word.trailing_zeros() as u64;
                if pos >= hi {
                    i = hi;
                    return None;
                }
                i = pos + 1;
                return Some(pos);
            }
            None
        })
    }

    pub fn any_in(&self, lo: u64, hi: u64) -> bool {
        self.ones_in(lo, hi).next().is_some()
    }

    pub fn ones(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(wi as u64 * 64 + tz)
            })
        })
    }
}

/// Membership of a single level: nothing, everything, or a bitmap indexed by
/// word rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Cell {
    Empty,
    Full,
    Some(Bits),
}

impl Cell {
    /// Number of members given the cell's total size.
    pub fn count(&self, size: u128) -> u128 {
        match self {
            Cell::Empty => 0,
            Cell::Full => size,
            Cell::Some(b) => b.count_ones() as u128,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_count() {
        let mut b = Bits::new(130);
        for i in [0, 63, 64, 129] {
            b.set(i);
        }
        assert!(b.get(63) && b.get(64) && !b.get(65) && !b.get(500));
        assert_eq!(b.count_ones(), 4);
        assert_eq!(b.ones().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert_eq!(b.ones_in(1, 129).collect::<Vec<_>>(), vec![63, 64]);
        assert_eq!(b.ones_in(65, 129).count(), 0);
        assert!(b.any_in(129, 200) && !b.any_in(1, 63));
    }
}
