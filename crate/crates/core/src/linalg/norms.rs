use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Default enumeration cap for [`brute_inf_to_one`].
pub const BRUTE_DIM_CAP: usize = 24;

// x-candidates per work item; fixed so results do not depend on thread count
const BLOCK_BITS: u32 = 10;

pub fn frobenius(m: &DenseMatrix) -> f64 {
    m.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn abs_entry_sum(m: &DenseMatrix) -> f64 {
    m.as_slice().iter().map(|v| v.abs()).sum()
}

/// Induced infinity norm: largest absolute row sum.
pub fn inf_induced(m: &DenseMatrix) -> f64 {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Induced one norm: largest absolute column sum.
pub fn one_induced(m: &DenseMatrix) -> f64 {
    inf_induced(&m.transpose())
}

/// Exact `max xᵀ M y` over sign vectors, enumerating the shorter side.
pub fn brute_inf_to_one(m: &DenseMatrix) -> Result<f64> {
    brute_inf_to_one_capped(m, BRUTE_DIM_CAP)
}

pub fn brute_inf_to_one_capped(m: &DenseMatrix, cap: usize) -> Result<f64> {
    // For fixed x the best y is sign(Mᵀx), worth sum_j |(Mᵀx)_j|.
    let t;
    let m = if m.rows() > m.cols() {
        t = m.transpose();
        &t
    } else {
        m
    };
    let r = m.rows();
    if r > cap {
        return Err(Error::OracleInfeasible { what: "inf-to-one enumeration dimension", size: r, cap });
    }
    if r == 0 || m.cols() == 0 {
        return Ok(0.0);
    }
    // (x, y) and (-x, -y) give the same value, so fix x_0 = +1.
    let free = (r - 1) as u32;
    let block_bits = BLOCK_BITS.min(free);
    let blocks = 1u64 << (free - block_bits);
    let best = (0..blocks)
        .into_par_iter()
        .map(|b| scan_block(m, b << block_bits, 1u64 << block_bits))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(best)
}

fn gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

// Walks Gray-code indices start..start+len; bit j of the code sets x_{j+1} = -1.
fn scan_block(m: &DenseMatrix, start: u64, len: u64) -> f64 {
    let cols = m.cols();
    let sign = |code: u64, i: usize| if i > 0 && (code >> (i - 1)) & 1 == 1 { -1.0 } else { 1.0 };
    let code = gray(start);
    let mut v = vec![0.0; cols];
    for i in 0..m.rows() {
        let s = sign(code, i);
        for (vj, &a) in v.iter_mut().zip(m.row(i)) {
            *vj += s * a;
        }
    }
    let mut code = code;
    let mut best = v.iter().map(|x| x.abs()).sum::<f64>();
    for step in 1..len {
        let bit = (start + step).trailing_zeros() as usize;
        code ^= 1 << bit;
        let row = bit + 1;
        // x_row flipped: v += 2 * new_sign * row
        let s = 2.0 * sign(code, row);
        for (vj, &a) in v.iter_mut().zip(m.row(row)) {
            *vj += s * a;
        }
        best = best.max(v.iter().map(|x| x.abs()).sum::<f64>());
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn double_enumeration(m: &DenseMatrix) -> f64 {
        let (r, c) = (m.rows(), m.cols());
        let mut best = f64::NEG_INFINITY;
        for xs in 0..1u32 << r {
            for ys in 0..1u32 << c {
                let mut s = 0.0;
                for i in 0..r {
                    for j in 0..c {
                        let x = if xs >> i & 1 == 1 { -1.0 } else { 1.0 };
                        let y = if ys >> j & 1 == 1 { -1.0 } else { 1.0 };
                        s += x * m[(i, j)] * y;
                    }
                }
                best = best.max(s);
            }
        }
        best
    }

    #[test]
    fn small_closed_forms() {
        let swap = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(brute_inf_to_one(&swap).unwrap(), 2.0);
        assert_eq!(brute_inf_to_one(&DenseMatrix::zeros(3, 3)).unwrap(), 0.0);
        assert_eq!(frobenius(&DenseMatrix::from_rows(&[vec![0.0, 3.0], vec![4.0, 0.0]]).unwrap()), 5.0);
    }

    #[test]
    fn matches_double_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (r, c) in [(4, 4), (3, 5), (6, 2), (1, 3)] {
            for _ in 0..10 {
                let m = DenseMatrix::from_fn(r, c, |_, _| if rng.random::<bool>() { 1.0 } else { -1.0 });
                assert_eq!(brute_inf_to_one(&m).unwrap(), double_enumeration(&m));
                let g = DenseMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0));
                assert!((brute_inf_to_one(&g).unwrap() - double_enumeration(&g)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gray_blocks_agree_with_single_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = DenseMatrix::from_fn(14, 9, |_, _| rng.random_range(-2i32..=2) as f64);
        let whole = scan_block(&m, 0, 1 << 13);
        assert_eq!(brute_inf_to_one(&m).unwrap(), whole);
    }

    #[test]
    fn cap_is_enforced() {
        let m = DenseMatrix::zeros(30, 30);
        assert!(matches!(brute_inf_to_one(&m), Err(Error::OracleInfeasible { .. })));
        assert!(brute_inf_to_one_capped(&DenseMatrix::zeros(30, 3), 4).is_ok());
    }
}
