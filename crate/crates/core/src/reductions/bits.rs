use std::fmt;
use std::str::FromStr;

/// Fixed-length binary string packed into 64-bit words. Bit `i` lives in
/// word `i / 64` at position `i % 64`; bits past `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        for i in 0..other.len {
            self.push(other.get(i));
        }
    }

    pub fn concat<'a, I>(parts: I) -> Self
    where
        I: IntoIterator<Item = &'a BitString>,
    {
        let mut out = BitString::default();
        for p in parts {
            out.extend_from(p);
        }
        out
    }

    /// 64 bits starting at bit `offset`, zero outside `[0, len)`.
    fn window(&self, offset: i64) -> u64 {
        let word = |q: i64| -> u64 {
            if q < 0 {
                0
            } else {
                self.words.get(q as usize).copied().unwrap_or(0)
            }
        };
        let q = offset.div_euclid(64);
        let r = offset.rem_euclid(64) as u32;
        if r == 0 {
            word(q)
        } else {
            (word(q) >> r) | (word(q + 1) << (64 - r))
        }
    }

    /// True iff some column holds a 1 in both strings when `other` is
    /// placed `shift` positions to the right of `self` (negative = left).
    pub fn collides_at(&self, other: &BitString, shift: i64) -> bool {
        self.words
            .iter()
            .enumerate()
            .any(|(w, &bits)| bits & other.window(w as i64 * 64 - shift) != 0)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

impl FromStr for BitString {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = BitString::default();
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                other => return Err(format!("character {i} is `{other}`, expected 0 or 1")),
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_collides(a: &BitString, b: &BitString, shift: i64) -> bool {
        a.ones().any(|x| {
            let y = x as i64 - shift;
            y >= 0 && b.get(y as usize)
        })
    }

    #[test]
    fn parse_and_display() {
        let b: BitString = "0110".parse().unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b.to_string(), "0110");
        assert_eq!(b.count_ones(), 2);
        assert!("01x".parse::<BitString>().is_err());
    }

    #[test]
    fn collisions_small() {
        let a: BitString = "11".parse().unwrap();
        assert!(a.collides_at(&a, 0));
        assert!(a.collides_at(&a, 1));
        assert!(!a.collides_at(&a, 2));
        assert!(a.collides_at(&a, -1));
        assert!(!a.collides_at(&a, -2));
    }

    proptest! {
        #[test]
        fn collides_matches_bitwise_scan(
            a in proptest::collection::vec(any::<bool>(), 0..200),
            b in proptest::collection::vec(any::<bool>(), 0..200),
            shift in -210i64..210,
        ) {
            let mut x = BitString::default();
            a.iter().for_each(|&v| x.push(v));
            let mut y = BitString::default();
            b.iter().for_each(|&v| y.push(v));
            prop_assert_eq!(x.collides_at(&y, shift), naive_collides(&x, &y, shift));
        }
    }
}
