/// Append-only array of fixed-width little-endian bit fields.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PackedBits {
    words: Vec<u64>,
    len: usize,
}

impl PackedBits {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_words(words: Vec<u64>, len: usize) -> Self {
        debug_assert!(words.len() == len.div_ceil(64));
        PackedBits { words, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Appends the low `width` bits of `value` (`width <= 64`).
    pub fn push(&mut self, value: u64, width: usize) {
        if width == 0 {
            return;
        }
        debug_assert!(width == 64 || value >> width == 0);
        let off = self.len % 64;
        if off == 0 {
            self.words.push(0);
        }
        let last = self.words.len() - 1;
        self.words[last] |= value << off;
        if off + width > 64 {
            self.words.push(value >> (64 - off));
        }
        self.len += width;
    }

    #[inline]
    pub fn get(&self, pos: usize, width: usize) -> u64 {
        debug_assert!(pos + width <= self.len && width <= 64);
        if width == 0 {
            return 0;
        }
        let (w, off) = (pos / 64, pos % 64);
        let mut v = self.words[w] >> off;
        if off + width > 64 {
            v |= self.words[w + 1] << (64 - off);
        }
        if width == 64 {
            v
        } else {
            v & ((1u64 << width) - 1)
        }
    }

    #[inline]
    pub fn bit(&self, pos: usize) -> bool {
        (self.words[pos / 64] >> (pos % 64)) & 1 == 1
    }
}

/// Bits needed to tell `count` values apart, at least 1.
pub fn id_width(count: usize) -> usize {
    (usize::BITS - count.saturating_sub(1).leading_zeros()).max(1) as usize
}

/// Stable LSD radix sort over 16-bit digits of fixed-width keys stored as
/// `words` consecutive `u64`s each (`bits` significant bits). Returns the
/// key indices in sorted order.
pub fn radix_order(keys: &[u64], words: usize, bits: usize) -> Vec<usize> {
    let count = keys.len().checked_div(words).unwrap_or(0);
    let mut order: Vec<usize> = (0..count).collect();
    let mut scratch = vec![0usize; count];
    let digits = bits.div_ceil(16);
    for d in 0..digits {
        let (w, shift) = (d / 4, (d % 4) * 16);
        let digit = |k: usize| ((keys[k * words + w] >> shift) & 0xFFFF) as usize;
        let mut counts = vec![0usize; 1 << 16 | 1];
        for &k in &order {
            counts[digit(k) + 1] += 1;
        }
        for x in 1..counts.len() {
            counts[x] += counts[x - 1];
        }
        for &k in &order {
            let slot = &mut counts[digit(k)];
            scratch[*slot] = k;
            *slot += 1;
        }
        std::mem::swap(&mut order, &mut scratch);
    }
    order
}
