//! The extended binary Golay code as the quadratic-residue code of length 23
//! extended by an overall parity bit.

const GENERATOR_POLY: u32 = 0b1100_0111_0101; // x^11+x^10+x^6+x^5+x^4+x^2+1

/// All 4096 codewords as 24-bit masks, bit `i` = coordinate `i`.
#[derive(Debug, Clone)]
pub struct GolayCode {
    generators: [u32; 12],
    words: Vec<u32>,
}

impl GolayCode {
    pub fn new() -> Self {
        let mut generators = [0u32; 12];
        for (i, g) in generators.iter_mut().enumerate() {
            let word = GENERATOR_POLY << i;
            let parity = word.count_ones() & 1;
            *g = word | (parity << 23);
        }
        let mut words = Vec::with_capacity(4096);
        for mask in 0u32..4096 {
            let mut w = 0;
            for (i, g) in generators.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    w ^= g;
                }
            }
            words.push(w);
        }
        words.sort_unstable();
        Self { generators, words }
    }

    pub fn generators(&self) -> &[u32; 12] {
        &self.generators
    }

    pub fn words(&self) -> &[u32] {
        &self.words
    }

    pub fn contains(&self, w: u32) -> bool {
        self.words.binary_search(&w).is_ok()
    }

    /// Number of codewords of each weight 0..=24.
    pub fn weight_distribution(&self) -> [u64; 25] {
        let mut d = [0u64; 25];
        for w in &self.words {
            d[w.count_ones() as usize] += 1;
        }
        d
    }
}

impl Default for GolayCode {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_distribution_is_golay() {
        let c = GolayCode::new();
        let d = c.weight_distribution();
        assert_eq!(d[0], 1);
        assert_eq!(d[8], 759);
        assert_eq!(d[12], 2576);
        assert_eq!(d[16], 759);
        assert_eq!(d[24], 1);
        assert_eq!(d.iter().sum::<u64>(), 4096);
    }

    #[test]
    fn code_is_self_orthogonal() {
        let c = GolayCode::new();
        for a in c.generators() {
            for b in c.generators() {
                assert_eq!((a & b).count_ones() % 2, 0);
            }
        }
        let w = c.generators()[0] ^ c.generators()[5];
        assert!(c.contains(w));
        assert!(!c.contains(1));
    }
}
