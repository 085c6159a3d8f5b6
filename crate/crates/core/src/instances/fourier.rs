use crate::error::{Error, Result};

/// Largest predicate arity accepted.
pub const MAX_ARITY: usize = 16;

/// Row of a truth table for the sign vector `z`.
///
/// Tables list `z ∈ {±1}^k` lexicographically with `+1` before `−1`: bit
/// `k−1−j` of the row is set iff `z_j = −1`.
pub fn table_index(z: &[f64]) -> usize {
    z.iter().fold(0, |acc, &zi| (acc << 1) | usize::from(zi < 0.0))
}

/// Sign vector of truth-table row `row`.
pub fn row_signs(k: usize, row: usize) -> Vec<f64> {
    (0..k).map(|j| if (row >> (k - 1 - j)) & 1 == 1 { -1.0 } else { 1.0 }).collect()
}

/// Mask with bit `j` set iff `z_j = −1` in row `row`.
fn negative_mask(k: usize, row: usize) -> usize {
    (0..k).filter(|&j| (row >> (k - 1 - j)) & 1 == 1).fold(0, |m, j| m | 1 << j)
}

pub fn check_table(table: &[u8]) -> Result<usize> {
    let len = table.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::invalid(format!("truth table length {len} is not 2^k with k ≥ 1")));
    }
    let k = len.trailing_zeros() as usize;
    if k > MAX_ARITY {
        return Err(Error::invalid(format!("arity {k} exceeds {MAX_ARITY}")));
    }
    if table.iter().any(|&v| v > 1) {
        return Err(Error::invalid("truth table entries must be 0 or 1"));
    }
    Ok(k)
}

/// Multilinear expansion `P(z) = Σ_S ĉ_S Π_{i∈S} z_i`; `coefficients[mask]`
/// is `ĉ_S` for the subset with bit `i` set iff `i ∈ S`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierExpansion {
    pub k: usize,
    pub coefficients: Vec<f64>,
}

pub fn fourier_decompose(table: &[u8]) -> Result<FourierExpansion> {
    let k = check_table(table)?;
    let size = 1usize << k;
    let neg: Vec<usize> = (0..size).map(|row| negative_mask(k, row)).collect();
    let coefficients = (0..size)
        .map(|s| {
            let sum: i64 = (0..size)
                .filter(|&row| table[row] == 1)
                .map(|row| if (neg[row] & s).count_ones() % 2 == 0 { 1 } else { -1 })
                .sum();
            sum as f64 / size as f64
        })
        .collect();
    Ok(FourierExpansion { k, coefficients })
}

impl FourierExpansion {
    pub fn coefficient(&self, subset: &[usize]) -> f64 {
        self.coefficients[subset.iter().fold(0, |m, &i| m | 1 << i)]
    }

    /// `ĉ_∅ = E P`.
    pub fn constant(&self) -> f64 {
        self.coefficients[0]
    }

    /// `ĉ_{[k]}`.
    pub fn top(&self) -> f64 {
        self.coefficients[(1 << self.k) - 1]
    }

    /// Subset masks of size `d` with nonzero coefficient.
    pub fn support_of_degree(&self, d: usize) -> Vec<usize> {
        (0..self.coefficients.len())
            .filter(|s| s.count_ones() as usize == d && self.coefficients[*s] != 0.0)
            .collect()
    }

    /// Degree-`d` part `P_d(z)`.
    pub fn degree_part(&self, d: usize, z: &[f64]) -> f64 {
        self.support_of_degree(d).into_iter().map(|s| self.coefficients[s] * chi(s, z)).sum()
    }

    pub fn evaluate(&self, z: &[f64]) -> f64 {
        (0..self.coefficients.len()).map(|s| self.coefficients[s] * chi(s, z)).sum()
    }

    /// Truth table recovered from the coefficients (rounded to 0/1).
    pub fn reconstruct(&self) -> Vec<u8> {
        (0..1usize << self.k).map(|row| self.evaluate(&row_signs(self.k, row)).round() as u8).collect()
    }
}

fn chi(s: usize, z: &[f64]) -> f64 {
    z.iter().enumerate().filter(|(i, _)| s >> i & 1 == 1).map(|(_, v)| v).product()
}

/// Truth table of a named predicate: `3sat` (any arity `ksat` also works as
/// `Ksat`), `parity-K`, or a raw table `tt:BITS` listing `2^k` zeros and ones.
pub fn parse_predicate(spec: &str) -> Result<Vec<u8>> {
    let spec = spec.trim();
    if let Some(bits) = spec.strip_prefix("tt:") {
        let table = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse(format!("truth table digit {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        check_table(&table)?;
        return Ok(table);
    }
    if let Some(k) = spec.strip_prefix("parity-") {
        let k = parse_arity(k)?;
        return Ok((0..1usize << k).map(|row| u8::from(row.count_ones() % 2 == 0)).collect());
    }
    if let Some(k) = spec.strip_suffix("sat") {
        let k = parse_arity(k)?;
        // OR of the k literals: false only when every literal is −1.
        return Ok((0..1usize << k).map(|row| u8::from(row != (1 << k) - 1)).collect());
    }
    Err(Error::Parse(format!("unknown predicate {spec:?}")))
}

fn parse_arity(s: &str) -> Result<usize> {
    let k: usize = s.parse().map_err(|_| Error::Parse(format!("bad arity {s:?}")))?;
    if k == 0 || k > MAX_ARITY {
        return Err(Error::Parse(format!("arity {k} out of range 1..={MAX_ARITY}")));
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_predicate() {
        let f = fourier_decompose(&[1; 8]).unwrap();
        assert_eq!(f.constant(), 1.0);
        assert!(f.coefficients[1..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn parity_by_hand() {
        // (1 + z1 z2 z3)/2
        let f = fourier_decompose(&parse_predicate("parity-3").unwrap()).unwrap();
        let mut expect = vec![0.0; 8];
        expect[0] = 0.5;
        expect[7] = 0.5;
        assert_eq!(f.coefficients, expect);
    }

    #[test]
    fn three_sat() {
        let t = parse_predicate("3sat").unwrap();
        assert_eq!(t, vec![1, 1, 1, 1, 1, 1, 1, 0]);
        let f = fourier_decompose(&t).unwrap();
        assert_eq!(f.constant(), 7.0 / 8.0);
        // 1 − Π(1 − z_i)/2 / 4 expands with ĉ_i = 1/8, ĉ_ij = −1/8, ĉ_123 = 1/8.
        assert_eq!(f.coefficient(&[0]), 0.125);
        assert_eq!(f.coefficient(&[0, 2]), -0.125);
        assert_eq!(f.top(), 0.125);
    }

    #[test]
    fn round_trip_all_k2_and_random_k3() {
        for bits in 0..16u32 {
            let t: Vec<u8> = (0..4).map(|i| (bits >> i & 1) as u8).collect();
            assert_eq!(fourier_decompose(&t).unwrap().reconstruct(), t);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..256 {
            let t: Vec<u8> = (0..8).map(|_| rng.random_range(0..2)).collect();
            let f = fourier_decompose(&t).unwrap();
            for (row, &bit) in t.iter().enumerate() {
                assert_eq!(f.evaluate(&row_signs(3, row)), f64::from(bit));
            }
        }
    }

    #[test]
    fn index_conventions() {
        assert_eq!(table_index(&[1.0, 1.0, -1.0]), 1);
        assert_eq!(table_index(&[-1.0, 1.0, 1.0]), 4);
        assert_eq!(row_signs(3, 4), vec![-1.0, 1.0, 1.0]);
    }

    #[test]
    fn predicate_errors() {
        assert!(parse_predicate("tt:101").is_err());
        assert!(parse_predicate("tt:1021").is_err());
        assert!(parse_predicate("parity-0").is_err());
        assert!(parse_predicate("majority").is_err());
        assert_eq!(parse_predicate("tt:0110").unwrap(), vec![0, 1, 1, 0]);
    }
}
