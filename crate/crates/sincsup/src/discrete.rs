//! The discrete proxy for the shifted-kernel supremum and its supporting
//! machinery: harmonic-weighted coefficient sums X = Y + Z, their
//! L-truncations and tail bounds, exact conditional sign expectations with a
//! brute-force oracle, and the biased-window statistic.
//!
//! Index conventions are 1-based in the formulas (matching the definitions)
//! and 0-based in the returned vectors.

use crate::error::{Error, Result};
use crate::fftconv::HarmonicProxyEngine;
use crate::signal::CoefficientVector;

/// The split of the proxy values X_k = Y_k + Z_k, where
///
/// * Y_k = Σ_{l=1..k}     a_{k−l+1} / l   (coefficients at and left of k),
/// * Z_k = Σ_{l=2..n−k+1} a_{l+k−1} / l   (coefficients right of k).
///
/// Equivalently X_k = a_k + Σ_{j≠k} a_j / (|j−k| + 1).
#[derive(Debug, Clone, PartialEq)]
pub struct ProxyVectors {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl ProxyVectors {
    pub fn max_abs_x(&self) -> f64 {
        self.x.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Reference evaluation of the proxy by the defining sums, O(n²).
pub fn proxy(a: &CoefficientVector) -> ProxyVectors {
    let n = a.len();
    let v = a.values();
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    for k in 1..=n {
        let mut yk = 0.0;
        for l in 1..=k {
            yk += v[k - l] / l as f64;
        }
        let mut zk = 0.0;
        for l in 2..=(n - k + 1) {
            zk += v[l + k - 2] / l as f64;
        }
        y[k - 1] = yk;
        z[k - 1] = zk;
    }
    let x = y.iter().zip(&z).map(|(p, q)| p + q).collect();
    ProxyVectors { x, y, z }
}

/// Fast path: both harmonic correlations in one FFT convolution, O(n log n).
/// Agrees with [`proxy`] to well under 1e−9 (see tests); the direct sum stays
/// the oracle.
pub fn proxy_via_convolution(a: &CoefficientVector) -> ProxyVectors {
    proxy_with_engine(a, &HarmonicProxyEngine::new(a.len()))
}

/// Engine-reusing variant for sweeps that evaluate many vectors of one length.
pub(crate) fn proxy_with_engine(a: &CoefficientVector, engine: &HarmonicProxyEngine) -> ProxyVectors {
    let (y, z) = engine.components(a.values());
    let x = y.iter().zip(&z).map(|(p, q)| p + q).collect();
    ProxyVectors { x, y, z }
}

/// The tail of Y_k after dropping its first `trunc_len` harmonic terms:
/// Y^L_k = Σ_{l=L+1..k} a_{k−l+1} / l, for 2 ≤ L < k ≤ n.
pub fn truncated_y(a: &CoefficientVector, k: usize, trunc_len: usize) -> Result<f64> {
    let n = a.len();
    if trunc_len < 2 || trunc_len >= k || k > n {
        return Err(Error::validation(format!(
            "truncated_y needs 2 ≤ L < k ≤ n, got L = {trunc_len}, k = {k}, n = {n}"
        )));
    }
    let v = a.values();
    let mut sum = 0.0;
    for l in (trunc_len + 1)..=k {
        sum += v[k - l] / l as f64;
    }
    Ok(sum)
}

/// Deterministic bound on the truncated head: for any |a_i| ≤ M and k ≤ L,
/// |Y_k| ≤ M·(1 + ln L) (harmonic-sum comparison). Natural log. Expects
/// L ≥ 2 and M ≥ 0; it is a pure formula with no error path.
pub fn truncation_bound(trunc_len: usize, max_abs: f64) -> f64 {
    debug_assert!(trunc_len >= 2);
    max_abs * (1.0 + (trunc_len as f64).ln())
}

/// Hoeffding tail bound for the truncated sum: P(|Y^L_k| > t) ≤
/// 2·exp(−L·t²/(2M²)), using Σ_{l>L} 1/l² ≤ 1/L, clipped to [0, 1].
/// Meaningful for t > 0; no error path (the clip keeps it a probability).
pub fn hoeffding_tail(trunc_len: usize, t: f64, max_abs: f64) -> f64 {
    let exponent = -(trunc_len as f64) * t * t / (2.0 * max_abs * max_abs);
    (2.0 * exponent.exp()).min(1.0)
}

/// Default truncation length for a given n: round(ln n) with floor 2.
pub fn default_truncation_len(n: usize) -> usize {
    ((n as f64).ln().round() as usize).max(2)
}

/// Exact expectation of Σ ε_i b_i when (ε_1,…,ε_p) is uniform over the sign
/// patterns with exactly k entries equal to +1: ((2k − p)/p)·Σ b_i.
pub fn conditional_sign_expectation(b: &[f64], k: usize) -> Result<f64> {
    let p = b.len();
    if k == 0 || k > p {
        return Err(Error::validation(format!(
            "conditional_sign_expectation needs 1 ≤ k ≤ p, got k = {k}, p = {p}"
        )));
    }
    let sum: f64 = b.iter().sum();
    Ok((2.0 * k as f64 - p as f64) / p as f64 * sum)
}

/// Brute-force oracle for [`conditional_sign_expectation`]: averages
/// Σ ε_i b_i over all C(p, k) patterns with exactly k plus signs, enumerated
/// by Gosper's hack. Capped at p ≤ 24.
pub fn brute_force_sign_expectation(b: &[f64], k: usize) -> Result<f64> {
    let p = b.len();
    if p > 24 {
        return Err(Error::validation(format!(
            "brute_force_sign_expectation is capped at p ≤ 24, got p = {p}"
        )));
    }
    if k == 0 || k > p {
        return Err(Error::validation(format!(
            "brute_force_sign_expectation needs 1 ≤ k ≤ p, got k = {k}, p = {p}"
        )));
    }
    let total: f64 = b.iter().sum();
    let limit: u32 = 1 << p;
    let mut subset: u32 = (1 << k) - 1;
    let mut sum = 0.0;
    let mut count = 0u64;
    while subset < limit {
        let mut plus = 0.0;
        let mut bits = subset;
        while bits != 0 {
            plus += b[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        sum += 2.0 * plus - total;
        count += 1;
        // Gosper's hack: next subset of the same popcount
        let c = subset & subset.wrapping_neg();
        let r = subset + c;
        if r >= limit || c == 0 {
            break;
        }
        subset = (((r ^ subset) >> 2) / c) | r;
    }
    Ok(sum / count as f64)
}

/// Maximum sum over the disjoint windows {jw+1,…,(j+1)w} of a ±1 sequence,
/// together with the first window index attaining it.
pub fn window_sum_statistic(signs: &[f64], window_len: usize) -> Result<(i64, usize)> {
    if window_len == 0 || window_len > signs.len() {
        return Err(Error::validation(format!(
            "window_sum_statistic needs 1 ≤ window_len ≤ {}, got {window_len}",
            signs.len()
        )));
    }
    if let Some(bad) = signs.iter().find(|v| v.abs() != 1.0) {
        return Err(Error::validation(format!(
            "window_sum_statistic expects a ±1 sequence, found {bad}"
        )));
    }
    let mut best = i64::MIN;
    let mut best_window = 0usize;
    for (j, window) in signs.chunks_exact(window_len).enumerate() {
        let sum: i64 = window.iter().map(|&v| if v > 0.0 { 1 } else { -1 }).sum();
        if sum > best {
            best = sum;
            best_window = j;
        }
    }
    Ok((best, best_window))
}

/// Fractional-offset analogue of X: for l = −n..2n returns
/// Σ_{k=1..n, k≠l} a_k / |l + offset − k|. With offset ∈ (0, 1) every
/// denominator is nonzero.
pub fn proxy_grid(a: &CoefficientVector, offset: f64) -> Result<Vec<f64>> {
    if !(offset > 0.0 && offset < 1.0) {
        return Err(Error::validation(format!(
            "proxy_grid offset must lie in (0,1), got {offset}"
        )));
    }
    let n = a.len() as i64;
    let v = a.values();
    let mut out = Vec::with_capacity((3 * n + 1) as usize);
    for l in -n..=2 * n {
        let mut sum = 0.0;
        for (idx, &ak) in v.iter().enumerate() {
            let k = idx as i64 + 1;
            if k == l {
                continue;
            }
            sum += ak / (l as f64 + offset - k as f64).abs();
        }
        out.push(sum);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::Ensemble;
    use proptest::prelude::*;

    fn vecf(vals: &[f64]) -> CoefficientVector {
        CoefficientVector::new(vals.to_vec()).unwrap()
    }

    #[test]
    fn proxy_known_values() {
        let p = proxy(&vecf(&[2.5]));
        assert_eq!(p.x, vec![2.5]);
        assert_eq!(p.y, vec![2.5]);
        assert_eq!(p.z, vec![0.0]);

        let p = proxy(&vecf(&[1.0, 1.0]));
        assert!((p.x[0] - 1.5).abs() < 1e-15);
        assert!((p.x[1] - 1.5).abs() < 1e-15);

        let p = proxy(&vecf(&[1.0, 0.0, 0.0]));
        assert!((p.x[0] - 1.0).abs() < 1e-15);
        assert!((p.x[1] - 0.5).abs() < 1e-15);
        assert!((p.x[2] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn proxy_edges() {
        let p = proxy(&vecf(&[0.3, -0.7, 1.1, 0.2]));
        assert_eq!(p.y[0], 0.3); // Y_1 = a_1
        assert_eq!(p.z[3], 0.0); // Z_n empty
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn proxy_split_is_consistent(
            vals in proptest::collection::vec(-10.0f64..10.0, 1..=128)
        ) {
            let a = vecf(&vals);
            let p = proxy(&a);
            prop_assert_eq!(p.y[0], vals[0]);
            prop_assert_eq!(p.z[vals.len() - 1], 0.0);
            for k in 0..vals.len() {
                prop_assert!((p.x[k] - (p.y[k] + p.z[k])).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn convolution_fast_path_matches_direct() {
        for (i, n) in [1usize, 2, 3, 5, 8, 17, 64, 129, 1000].into_iter().enumerate() {
            let a = Ensemble::gaussian(1.0).unwrap().sample(n, 500 + i as u64).unwrap();
            let slow = proxy(&a);
            let fast = proxy_via_convolution(&a);
            for k in 0..n {
                assert!(
                    (slow.x[k] - fast.x[k]).abs() <= 1e-9,
                    "n={n} k={k}: {} vs {}",
                    slow.x[k],
                    fast.x[k]
                );
                assert!((slow.y[k] - fast.y[k]).abs() <= 1e-9);
                assert!((slow.z[k] - fast.z[k]).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn truncated_y_single_term_and_identity() {
        let ones = vecf(&vec![1.0; 20]);
        for l_trunc in [2usize, 5, 9] {
            let got = truncated_y(&ones, l_trunc + 1, l_trunc).unwrap();
            assert!((got - 1.0 / (l_trunc + 1) as f64).abs() < 1e-15);
        }

        let a = Ensemble::gaussian(1.0).unwrap().sample(100, 77).unwrap();
        let p = proxy(&a);
        let (k, l_trunc) = (50usize, 5usize);
        let head: f64 = (1..=l_trunc)
            .map(|l| a.values()[k - l] / l as f64)
            .sum();
        let tail = truncated_y(&a, k, l_trunc).unwrap();
        assert!((p.y[k - 1] - (head + tail)).abs() <= 1e-12);

        let zero = vecf(&vec![0.0; 10]);
        assert_eq!(truncated_y(&zero, 8, 3).unwrap(), 0.0);
    }

    #[test]
    fn truncated_y_rejects_bad_parameters() {
        let a = vecf(&vec![1.0; 10]);
        assert!(truncated_y(&a, 5, 1).is_err()); // L < 2
        assert!(truncated_y(&a, 5, 5).is_err()); // k ≤ L
        assert!(truncated_y(&a, 11, 2).is_err()); // k > n
    }

    #[test]
    fn truncation_bound_dominates_heads() {
        assert!((truncation_bound(2, 1.0) - (1.0 + 2.0f64.ln())).abs() < 1e-15);
        assert_eq!(truncation_bound(5, 0.0), 0.0);

        let l_trunc = 10usize;
        let bound = truncation_bound(l_trunc, 1.0);
        let ens = Ensemble::bounded_symmetric(1.0, 0.5, crate::ensembles::BoundedShape::Uniform)
            .unwrap();
        for seed in 0..10_000u64 {
            let a = ens.sample(l_trunc, seed).unwrap();
            let p = proxy(&a);
            for k in 1..=l_trunc {
                assert!(p.y[k - 1].abs() <= bound, "seed {seed} k {k}");
            }
        }
    }

    #[test]
    fn hoeffding_tail_values() {
        // L = 8, t = 1/2, M = 1 makes the exponent exactly −1
        assert!((hoeffding_tail(8, 0.5, 1.0) - 2.0 / std::f64::consts::E).abs() < 1e-12);
        assert!(hoeffding_tail(100, 50.0, 1.0) < 1e-300);
        assert_eq!(hoeffding_tail(2, 0.01, 1.0), 1.0); // clipped
    }

    #[test]
    fn default_truncation_lengths() {
        assert_eq!(default_truncation_len(1), 2);
        assert_eq!(default_truncation_len(20), 3);
        assert_eq!(default_truncation_len(10_000), 9);
    }

    #[test]
    fn sign_expectation_examples() {
        assert_eq!(conditional_sign_expectation(&[3.0, -1.0], 1).unwrap(), 0.0);
        let e = conditional_sign_expectation(&[1.0, 1.0, 1.0], 2).unwrap();
        assert!((e - 1.0).abs() < 1e-15);
        let b = [0.4, -1.2, 2.0, 0.7];
        let all_plus = conditional_sign_expectation(&b, 4).unwrap();
        assert!((all_plus - b.iter().sum::<f64>()).abs() < 1e-15);

        assert!(conditional_sign_expectation(&b, 0).is_err());
        assert!(conditional_sign_expectation(&b, 5).is_err());
    }

    #[test]
    fn brute_force_examples_and_cap() {
        assert_eq!(brute_force_sign_expectation(&[2.5], 1).unwrap(), 2.5);
        let e = brute_force_sign_expectation(&[0.25, -1.5], 2).unwrap();
        assert!((e - (0.25 - 1.5)).abs() < 1e-15);
        assert!(brute_force_sign_expectation(&vec![1.0; 25], 3).is_err());
        assert!(brute_force_sign_expectation(&[1.0, 2.0], 3).is_err());
    }

    #[test]
    fn conditional_matches_brute_force() {
        let mut state = 0x1234u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        for p in 1..=8usize {
            for k in 1..=p {
                for _ in 0..20 {
                    let b: Vec<f64> = (0..p).map(|_| next()).collect();
                    let exact = conditional_sign_expectation(&b, k).unwrap();
                    let brute = brute_force_sign_expectation(&b, k).unwrap();
                    assert!(
                        (exact - brute).abs() <= 1e-12,
                        "p={p} k={k}: {exact} vs {brute}"
                    );
                }
            }
        }
    }

    #[test]
    fn window_statistic_examples() {
        let all_plus = vec![1.0; 16];
        assert_eq!(window_sum_statistic(&all_plus, 4).unwrap(), (4, 0));

        let alternating: Vec<f64> =
            (0..16).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_eq!(window_sum_statistic(&alternating, 4).unwrap(), (0, 0));

        // the max lives in the second window
        let signs = [-1.0, -1.0, 1.0, 1.0, 1.0, 1.0, -1.0, 1.0];
        assert_eq!(window_sum_statistic(&signs, 2).unwrap(), (2, 1));

        assert!(window_sum_statistic(&all_plus, 0).is_err());
        assert!(window_sum_statistic(&all_plus, 17).is_err());
        assert!(window_sum_statistic(&[1.0, 0.5], 1).is_err());
    }

    #[test]
    fn window_statistic_finds_positive_windows_at_scale() {
        // a positive-sum window of length ⌊log₂ n⌋ should exist essentially
        // always at n = 2^20
        let n = 1usize << 20;
        let w = 20usize;
        let ens = Ensemble::rademacher();
        let mut hits = 0;
        for seed in 0..200u64 {
            let a = ens.sample(n, seed).unwrap();
            let (max_sum, _) = window_sum_statistic(a.values(), w).unwrap();
            if max_sum >= 1 {
                hits += 1;
            }
        }
        assert!(hits >= 198, "only {hits}/200 trials had a positive window");
    }

    #[test]
    fn proxy_grid_examples() {
        let single = proxy_grid(&vecf(&[1.0]), 0.5).unwrap();
        assert_eq!(single.len(), 4);
        assert_eq!(single[2], 0.0); // l = 1: the only term is removed

        let pair = proxy_grid(&vecf(&[1.0, 1.0]), 0.5).unwrap();
        assert_eq!(pair.len(), 7);
        // l = 1 lives at index l + n = 3; only the k = 2 term remains
        assert!((pair[3] - 2.0).abs() < 1e-15);

        let zeros = proxy_grid(&vecf(&[0.0, 0.0, 0.0]), 0.25).unwrap();
        assert!(zeros.iter().all(|&v| v == 0.0));

        assert!(proxy_grid(&vecf(&[1.0]), 0.0).is_err());
        assert!(proxy_grid(&vecf(&[1.0]), 1.0).is_err());
    }

    #[test]
    fn proxy_grid_brackets_proxy_near_zero_offset() {
        // as offset → 0⁺ the grid value at l ∈ {1,…,n} approaches
        // Σ_{k≠l} a_k/|l−k|, which for nonnegative a is between X_l − a_l
        // and 2(X_l − a_l)
        let n = 40usize;
        let mut vals = Vec::with_capacity(n);
        let mut state = 9u64;
        for _ in 0..n {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            vals.push(0.1 + 0.9 * ((state >> 11) as f64 / (1u64 << 53) as f64));
        }
        let a = vecf(&vals);
        let p = proxy(&a);
        let grid = proxy_grid(&a, 1e-9).unwrap();
        for l in 1..=n {
            let base = p.x[l - 1] - vals[l - 1];
            let g = grid[l + n];
            assert!(g >= base - 1e-6, "l={l}: {g} < {base}");
            assert!(g <= 2.0 * base + 1e-6, "l={l}: {g} > 2·{base}");
        }
    }
}
