/// Growable bitset over class ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassSet {
    words: Vec<u64>,
}

impl ClassSet {
    pub fn with_capacity(bits: usize) -> Self {
        ClassSet { words: vec![0; bits.div_ceil(64)] }
    }

    pub fn contains(&self, bit: u32) -> bool {
        let (w, b) = (bit as usize / 64, bit % 64);
        self.words.get(w).is_some_and(|x| x & (1 << b) != 0)
    }

    /// Returns true if the bit was newly set.
    pub fn insert(&mut self, bit: u32) -> bool {
        let (w, b) = (bit as usize / 64, bit % 64);
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            (0..64u32).filter(move |b| word & (1 << b) != 0).map(move |b| w as u32 * 64 + b)
        })
    }
}
