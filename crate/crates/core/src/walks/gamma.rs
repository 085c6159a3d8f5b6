use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, spectral_radius_upper, NormKind, SymWeightedMatrix};
use crate::nonbacktracking::companion;
use crate::rng::stream_rng;

/// Each pair `u < v` is an edge with probability `d/n`, weight `±1`
/// equiprobable. Pair number `r` (lexicographic) draws from stream `r`.
pub fn sample_gamma_graph(n: usize, d: f64, seed: u64) -> Result<SymWeightedMatrix> {
    if !(d > 0.0 && d <= n as f64) {
        return Err(Error::invalid(format!("average degree d={d} must satisfy 0 < d ≤ n={n}")));
    }
    let p = d / n as f64;
    let mut triples = Vec::new();
    let mut rank = 0u64;
    for u in 0..n {
        for v in u + 1..n {
            let mut rng = stream_rng(seed, rank);
            rank += 1;
            if rng.random::<f64>() < p {
                triples.push((u, v, if rng.random::<bool>() { 1.0 } else { -1.0 }));
            }
        }
    }
    SymWeightedMatrix::from_entries(n, triples)
}

/// `ρ(B)` for a `±1`-weighted graph, read off the `2n × 2n` companion
/// matrix. The companion's spectrum is that of `B` with `n − m` copies of
/// `±1` added (`m < n`) or `m − n` copies removed (`m > n`).
pub fn rho_b(a: &SymWeightedMatrix) -> Result<f64> {
    if a.edges().iter().any(|&(_, _, w)| w.abs() != 1.0) {
        return Err(Error::invalid("rho_b needs ±1 weights"));
    }
    let (n, m) = (a.n(), a.edge_count());
    let mut eig: Vec<_> = eigenvalues(&companion(a))?;
    if m < n {
        for target in [1.0, -1.0] {
            for _ in 0..n - m {
                let (idx, _) = eig
                    .iter()
                    .enumerate()
                    .map(|(i, l)| (i, (l - target).norm()))
                    .min_by(|x, y| x.1.total_cmp(&y.1))
                    .expect("companion has at least 2(n − m) eigenvalues");
                eig.swap_remove(idx);
            }
        }
    }
    let rho = eig.iter().map(|l| l.norm()).fold(0.0, f64::max);
    Ok(if m > n { rho.max(1.0) } else { rho })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoRecord {
    pub n: usize,
    pub d: f64,
    pub seed: u64,
    #[serde(rename = "rho_B")]
    pub rho_b: f64,
    /// Gelfand upper bound on `ρ(B)` at power `z`.
    pub gelfand_z: f64,
    /// `ρ(B)/√d`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoReport {
    pub records: Vec<RhoRecord>,
    pub median_ratio: f64,
}

impl RhoReport {
    /// One JSON object per line, in seed order.
    pub fn to_json_lines(&self) -> String {
        self.records.iter().map(|r| serde_json::to_string(r).expect("record serializes") + "\n").collect()
    }
}

/// Samples one graph per seed and records `ρ(B)` and its Gelfand bound.
pub fn rho_b_experiment(n: usize, d: f64, seeds: &[u64], z: usize) -> Result<RhoReport> {
    let records = seeds
        .par_iter()
        .map(|&seed| {
            let a = sample_gamma_graph(n, d, seed)?;
            let rho = rho_b(&a)?;
            let c = companion(&a);
            let mut gelfand = spectral_radius_upper(&c, z, NormKind::Frobenius)?;
            if a.edge_count() > n {
                gelfand = gelfand.max(1.0);
            }
            Ok(RhoRecord { n, d, seed, rho_b: rho, gelfand_z: gelfand, ratio: rho / d.sqrt() })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut ratios: Vec<f64> = records.iter().map(|r| r.ratio).collect();
    ratios.sort_by(f64::total_cmp);
    let median_ratio = match ratios.len() {
        0 => f64::NAN,
        l if l % 2 == 1 => ratios[l / 2],
        l => 0.5 * (ratios[l / 2 - 1] + ratios[l / 2]),
    };
    Ok(RhoReport { records, median_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral_radius;
    use crate::nonbacktracking::build;

    #[test]
    fn complete_when_d_is_n() {
        let a = sample_gamma_graph(6, 6.0, 3).unwrap();
        assert_eq!(a.edge_count(), 15);
        assert!(a.edges().iter().all(|&(_, _, w)| w.abs() == 1.0));
        assert!(sample_gamma_graph(6, 0.0, 3).is_err());
        assert!(sample_gamma_graph(6, 7.0, 3).is_err());
        assert_eq!(sample_gamma_graph(30, 3.0, 9).unwrap(), sample_gamma_graph(30, 3.0, 9).unwrap());
    }

    #[test]
    fn companion_radius_matches_edge_space() {
        for (n, d, seed) in [(8, 1.0, 1), (8, 2.0, 2), (10, 4.0, 3), (6, 6.0, 4), (9, 1.5, 5)] {
            let a = sample_gamma_graph(n, d, seed).unwrap();
            let direct = if a.edge_count() == 0 { 0.0 } else { spectral_radius(&build(&a).unwrap().b).unwrap() };
            let via = rho_b(&a).unwrap();
            assert!((direct - via).abs() < 1e-6, "n={n} d={d}: {direct} vs {via}");
        }
    }

    #[test]
    fn experiment_is_deterministic() {
        let a = rho_b_experiment(30, 3.0, &[1, 2, 3], 16).unwrap();
        assert_eq!(a, rho_b_experiment(30, 3.0, &[1, 2, 3], 16).unwrap());
        for r in &a.records {
            assert!(r.gelfand_z >= r.rho_b - 1e-9);
        }
        let line = a.to_json_lines();
        assert!(line.lines().next().unwrap().contains("\"rho_B\""));
    }
}
