//! Longest-common-subsequence / substring kernels over unicode scalar values.
//!
//! [`Profile`] precomputes per-character match bitmasks of one string so the
//! subsequence length against any other string runs in
//! `O(|other| * ceil(|profiled| / 64))` word operations (Hyyrö's bit-vector
//! formulation). [`subsequence_rolling`] is the plain two-row DP kept as a
//! slow path and cross-check.

const ASCII: usize = 128;

/// Match bitmasks of a string: bit `i` of `mask(c)` is set iff `s[i] == c`.
#[derive(Debug, Clone)]
pub struct Profile {
    len: usize,
    words: usize,
    ascii: Vec<u64>,
    // Sorted by char; each entry owns `words` consecutive u64s in `other_masks`.
    other: Vec<char>,
    other_masks: Vec<u64>,
}

impl Profile {
    pub fn new(s: &[char]) -> Profile {
        let len = s.len();
        let words = len.div_ceil(64).max(1);
        let mut ascii = vec![0u64; ASCII * words];
        let mut other: Vec<char> = s.iter().copied().filter(|c| !c.is_ascii()).collect();
        other.sort_unstable();
        other.dedup();
        let mut other_masks = vec![0u64; other.len() * words];
        for (i, &c) in s.iter().enumerate() {
            let (w, bit) = (i / 64, 1u64 << (i % 64));
            if c.is_ascii() {
                ascii[c as usize * words + w] |= bit;
            } else {
                let k = other.binary_search(&c).expect("char indexed above");
                other_masks[k * words + w] |= bit;
            }
        }
        Profile {
            len,
            words,
            ascii,
            other,
            other_masks,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> usize {
        self.words
    }

    fn mask(&self, c: char) -> Option<&[u64]> {
        if c.is_ascii() {
            let at = c as usize * self.words;
            Some(&self.ascii[at..at + self.words])
        } else {
            self.other
                .binary_search(&c)
                .ok()
                .map(|k| &self.other_masks[k * self.words..(k + 1) * self.words])
        }
    }

    /// LCS length between the profiled string and `other`.
    pub fn lcs(&self, other: &[char]) -> usize {
        if self.len == 0 || other.is_empty() {
            return 0;
        }
        if self.words == 1 {
            return self.lcs_single(other);
        }
        let mut v = vec![u64::MAX; self.words];
        for &c in other {
            let Some(m) = self.mask(c) else { continue };
            let mut carry = false;
            for (vw, &mw) in v.iter_mut().zip(m) {
                let u = *vw & mw;
                let (s1, c1) = vw.overflowing_add(u);
                let (s2, c2) = s1.overflowing_add(carry as u64);
                carry = c1 | c2;
                *vw = s2 | (*vw & !mw);
            }
        }
        self.len - self.zeros_to_ones(&v)
    }

    fn lcs_single(&self, other: &[char]) -> usize {
        let mut v = u64::MAX;
        for &c in other {
            let m = if c.is_ascii() {
                self.ascii[c as usize]
            } else {
                match self.other.binary_search(&c) {
                    Ok(k) => self.other_masks[k],
                    Err(_) => continue,
                }
            };
            let u = v & m;
            v = v.wrapping_add(u) | (v & !m);
        }
        self.len - self.zeros_to_ones(&[v])
    }

    // Number of set bits of `v` among the low `len` bits.
    fn zeros_to_ones(&self, v: &[u64]) -> usize {
        let full = self.len / 64;
        let mut ones: usize = v[..full].iter().map(|w| w.count_ones() as usize).sum();
        let rem = self.len % 64;
        if rem > 0 {
            ones += (v[full] & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        ones
    }
}

/// Bit-parallel LCS length; profiles the shorter string.
pub fn subsequence(a: &[char], b: &[char]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    Profile::new(short).lcs(long)
}

/// Two-row dynamic programme, memory `O(min(|a|, |b|))`.
pub fn subsequence_rolling(a: &[char], b: &[char]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut prev = vec![0usize; short.len() + 1];
    let mut cur = vec![0usize; short.len() + 1];
    for &cl in long {
        for (j, &cs) in short.iter().enumerate() {
            cur[j + 1] = if cl == cs {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[short.len()]
}

/// Longest common contiguous run, two-row DP.
pub fn substring(a: &[char], b: &[char]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut prev = vec![0usize; short.len() + 1];
    let mut cur = vec![0usize; short.len() + 1];
    let mut best = 0;
    for &cl in long {
        for (j, &cs) in short.iter().enumerate() {
            cur[j + 1] = if cl == cs { prev[j] + 1 } else { 0 };
            best = best.max(cur[j + 1]);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn known_values() {
        let cases = [
            ("", "", 0),
            ("", "abcd", 0),
            ("abcd", "c", 1),
            ("abcdefghi", "acegi", 5),
            ("abcdgh", "aedfhr", 3),
            ("aggtab", "gxtxayb", 4),
            ("你好，世界", "再见世界", 2),
            ("i love twitter", "i love to spam", 8),
        ];
        for (a, b, want) in cases {
            let (a, b) = (chars(a), chars(b));
            assert_eq!(subsequence(&a, &b), want);
            assert_eq!(subsequence_rolling(&a, &b), want);
        }
    }

    #[test]
    fn multiword_boundaries() {
        for n in [63, 64, 65, 127, 128, 129, 200] {
            let a: Vec<char> = (0..n).map(|i| (b'a' + (i % 7) as u8) as char).collect();
            let b: Vec<char> = (0..n).map(|i| (b'a' + (i % 5) as u8) as char).collect();
            assert_eq!(subsequence(&a, &a), n);
            assert_eq!(subsequence(&a, &b), subsequence_rolling(&a, &b), "n={n}");
        }
    }

    #[test]
    fn substring_values() {
        assert_eq!(substring(&chars("i love twitter"), &chars("i love to spam")), 8);
        assert_eq!(substring(&chars("xabcy"), &chars("zzabcq")), 3);
        assert_eq!(substring(&chars("abc"), &chars("xyz")), 0);
        assert_eq!(substring(&chars(""), &chars("xyz")), 0);
    }
}
