//! Word-packed bit sets backing adjacency rows and vertex masks.

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BitSet {
    nbits: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(nbits: usize) -> Self {
        BitSet {
            nbits,
            words: vec![0; nbits.div_ceil(64)],
        }
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.nbits);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.nbits);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let nbits = self.nbits;
        self.words.iter().enumerate().flat_map(move |(wi, &w)| {
            BitIter { word: w, base: wi * 64 }.take_while(move |&i| i < nbits)
        })
    }

    /// Smallest member of `self & !excluded`, if any.
    pub fn first_not_in(&self, excluded: &BitSet) -> Option<usize> {
        debug_assert_eq!(self.nbits, excluded.nbits);
        for (wi, (&a, &b)) in self.words.iter().zip(&excluded.words).enumerate() {
            let w = a & !b;
            if w != 0 {
                let i = wi * 64 + w.trailing_zeros() as usize;
                if i < self.nbits {
                    return Some(i);
                }
            }
        }
        None
    }
}

struct BitIter {
    word: u64,
    base: usize,
}

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.word == 0 {
            return None;
        }
        let tz = self.word.trailing_zeros() as usize;
        self.word &= self.word - 1;
        Some(self.base + tz)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_contains_iter() {
        let mut s = BitSet::new(130);
        for i in [0, 63, 64, 65, 129] {
            s.insert(i);
        }
        assert!(s.contains(64));
        assert!(!s.contains(1));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 63, 64, 65, 129]);
        assert_eq!(s.len(), 5);
    }

    #[test]
    fn first_not_in_skips_excluded() {
        let mut a = BitSet::new(10);
        let mut b = BitSet::new(10);
        a.insert(2);
        a.insert(5);
        b.insert(2);
        assert_eq!(a.first_not_in(&b), Some(5));
        b.insert(5);
        assert_eq!(a.first_not_in(&b), None);
    }
}
