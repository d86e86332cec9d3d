//! Signal families built from a coefficient vector a ∈ ℝⁿ.
//!
//! The main object is the shifted-sinc series f(t) = Σₖ aₖ·sinc(t − k),
//! k = 1..n. Two contrast families share the coefficient plumbing: a uniformly
//! bounded orthonormal Fourier system on [0,1] (whose random sups grow like
//! √(n log n)) and an integrable Gaussian-bump kernel (whose sups stay
//! bounded by a lattice constant times max|aₖ|).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fftconv::OffsetGridEngine;
use crate::kernel;

/// Finite, nonempty coefficient vector. Index k in formulas is 1-based;
/// storage is 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    values: Vec<f64>,
}

impl CoefficientVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::validation("coefficient vector must have n ≥ 1"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "coefficient vector contains non-finite entry {bad}"
            )));
        }
        Ok(CoefficientVector { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // n ≥ 1 by construction
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sum_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }
}

/// f(t) = Σₖ aₖ·sinc(t − k), k = 1..n.
#[derive(Debug, Clone)]
pub struct SincSeries {
    coeffs: CoefficientVector,
}

/// Values f(l + offset_r) for all integers l = −n..2n and a list of
/// fractional offsets, as produced by [`SincSeries::evaluate_offset_grid`].
#[derive(Debug, Clone)]
pub struct OffsetGrid {
    n: usize,
    offsets: Vec<f64>,
    /// values[r][l + n] = f(l + offsets[r])
    values: Vec<Vec<f64>>,
}

impl OffsetGrid {
    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// Inclusive integer range of l.
    pub fn l_range(&self) -> (i64, i64) {
        (-(self.n as i64), 2 * self.n as i64)
    }

    pub fn value(&self, l: i64, offset_index: usize) -> f64 {
        let idx = (l + self.n as i64) as usize;
        self.values[offset_index][idx]
    }

    /// Row of values for one offset, indexed by l + n.
    pub fn row(&self, offset_index: usize) -> &[f64] {
        &self.values[offset_index]
    }
}

impl SincSeries {
    pub fn new(coeffs: CoefficientVector) -> Self {
        SincSeries { coeffs }
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Ok(SincSeries::new(CoefficientVector::new(values)?))
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self) -> &CoefficientVector {
        &self.coeffs
    }

    /// f(t). Errors on non-finite t.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::domain(format!("evaluate: non-finite t = {t}")));
        }
        Ok(self.value_at(t))
    }

    /// f'(t). Errors on non-finite t.
    pub fn evaluate_derivative(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::domain(format!(
                "evaluate_derivative: non-finite t = {t}"
            )));
        }
        Ok(self.derivative_at(t))
    }

    /// Pointwise evaluation via the folded form: with l = round(t) and
    /// δ = t − l, sin(π(t−k)) = (−1)^(l−k)·sin(πδ) exactly, so
    ///   f(t) = (sin(πδ)/π)·(−1)^l·Σ_{k≠l} (−1)^k aₖ/(t−k)  +  a_l·sinc(δ),
    /// costing one sin + O(n) flops instead of n transcendentals. At integer t
    /// the first term vanishes exactly and interpolation f(l) = a_l is exact.
    pub(crate) fn value_at(&self, t: f64) -> f64 {
        let a = self.coeffs.values();
        let n = a.len();
        let l = t.round();
        let li = l as i64;
        let delta = t - l;

        let mut s = 0.0f64;
        for (k0, &ak) in a.iter().enumerate() {
            let k = (k0 + 1) as i64;
            if k == li {
                continue;
            }
            let sign = if k0 % 2 == 0 { -1.0 } else { 1.0 }; // (−1)^k, k = k0+1
            s += sign * ak / (t - k as f64);
        }
        let parity = if li.rem_euclid(2) == 0 { 1.0 } else { -1.0 }; // (−1)^l
        let mut v = (PI * delta).sin() / PI * parity * s;
        if li >= 1 && li <= n as i64 {
            v += a[(li - 1) as usize] * kernel::sinc(delta);
        }
        v
    }

    /// Pointwise derivative via the same folding:
    ///   f'(t) = (−1)^l·[cos(πδ)·Σ' (−1)^k aₖ/(t−k) − (sin(πδ)/π)·Σ' (−1)^k aₖ/(t−k)²]
    ///           + a_l·sinc'(δ),
    /// where Σ' skips k = l.
    pub(crate) fn derivative_at(&self, t: f64) -> f64 {
        let a = self.coeffs.values();
        let n = a.len();
        let l = t.round();
        let li = l as i64;
        let delta = t - l;

        let mut s1 = 0.0f64;
        let mut s2 = 0.0f64;
        for (k0, &ak) in a.iter().enumerate() {
            let k = (k0 + 1) as i64;
            if k == li {
                continue;
            }
            let sign = if k0 % 2 == 0 { -1.0 } else { 1.0 };
            let d = t - k as f64;
            s1 += sign * ak / d;
            s2 += sign * ak / (d * d);
        }
        let parity = if li.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let pd = PI * delta;
        let mut v = parity * (pd.cos() * s1 - pd.sin() / PI * s2);
        if li >= 1 && li <= n as i64 {
            v += a[(li - 1) as usize] * kernel::sinc_derivative(delta);
        }
        v
    }

    /// Evaluate f on the full integer-shifted grid {l + offset : l = −n..2n}
    /// for each offset in (0,1), via FFT convolution (O((n + #offsets·n)·log n)
    /// total instead of O(#offsets·n²) pointwise).
    pub fn evaluate_offset_grid(&self, offsets: &[f64]) -> Result<OffsetGrid> {
        for &t in offsets {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::validation(format!(
                    "offset {t} outside the open interval (0,1)"
                )));
            }
        }
        let engine = OffsetGridEngine::new(self.n(), offsets);
        Ok(self.offset_grid_with(&engine, offsets))
    }

    /// Same computation with a caller-held engine (sweeps reuse kernel spectra
    /// across trials; results are bitwise identical to `evaluate_offset_grid`).
    pub(crate) fn offset_grid_with(&self, engine: &OffsetGridEngine, offsets: &[f64]) -> OffsetGrid {
        debug_assert_eq!(engine.n(), self.n());
        OffsetGrid {
            n: self.n(),
            offsets: offsets.to_vec(),
            values: engine.rows(self.coeffs.values()),
        }
    }
}

/// The uniformly bounded orthonormal system φₖ(t) = √2·cos(2πkt) on [0,1]:
/// F(t) = Σₖ aₖ·φₖ(t).
#[derive(Debug, Clone)]
pub struct FourierBaseline {
    coeffs: CoefficientVector,
}

impl FourierBaseline {
    pub fn new(coeffs: CoefficientVector) -> Self {
        FourierBaseline { coeffs }
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self) -> &CoefficientVector {
        &self.coeffs
    }

    /// F(t) for t ∈ [0,1]; outside that interval the system is not defined.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || !(0.0..=1.0).contains(&t) {
            return Err(Error::domain(format!(
                "FourierBaseline::evaluate: t = {t} outside [0,1]"
            )));
        }
        let mut v = 0.0;
        for (k0, &ak) in self.coeffs.values().iter().enumerate() {
            v += ak * std::f64::consts::SQRT_2 * (2.0 * PI * (k0 + 1) as f64 * t).cos();
        }
        Ok(v)
    }

    /// (grid max of |F|, certified-slack upper bound): |F| is scanned on a
    /// uniform grid of 32n points; |F'| ≤ 2πn·√2·Σ|aₖ| bounds the between-grid
    /// excursion by (grid step)·that.
    pub fn sup_scan(&self) -> (f64, f64) {
        let n = self.n();
        let m = 32 * n;
        let grid = crate::fftconv::fourier_grid_values(self.coeffs.values(), m);
        let lower = grid.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let deriv_bound =
            2.0 * PI * n as f64 * std::f64::consts::SQRT_2 * self.coeffs.sum_abs();
        let upper = lower + deriv_bound / m as f64;
        (lower, upper)
    }
}

/// Effective support radius of the Gaussian bump g(t) = exp(−t²):
/// exp(−10²) ≈ 3.7e−44 is far below f64 noise at any realistic scale.
const GAUSS_WINDOW: i64 = 10;

/// Σₖ aₖ·exp(−(t−k)²) with the |t−k| ≤ 10 truncation.
pub fn gaussian_kernel_value(coeffs: &CoefficientVector, t: f64) -> f64 {
    let n = coeffs.len() as i64;
    let k_lo = ((t - GAUSS_WINDOW as f64).ceil() as i64).max(1);
    let k_hi = ((t + GAUSS_WINDOW as f64).floor() as i64).min(n);
    let a = coeffs.values();
    let mut v = 0.0;
    for k in k_lo..=k_hi {
        let d = t - k as f64;
        v += a[(k - 1) as usize] * (-d * d).exp();
    }
    v
}

/// sup over one period of the Gaussian lattice sum Σ_{k∈ℤ} exp(−(k+t)²),
/// computed once. The sum peaks exactly at lattice points (t = 0, on the
/// grid), so a fine scan with a tiny inflation is a certified constant.
fn gauss_lattice_constant() -> f64 {
    static CONSTANT: std::sync::LazyLock<f64> = std::sync::LazyLock::new(|| {
        let m = 100_000usize;
        let mut best = 0.0f64;
        for i in 0..m {
            let t = i as f64 / m as f64;
            let mut s = 0.0;
            for k in -GAUSS_WINDOW..=GAUSS_WINDOW {
                let d = k as f64 + t;
                s += (-d * d).exp();
            }
            best = best.max(s);
        }
        best * (1.0 + 1e-9)
    });
    *CONSTANT
}

/// Certified upper bound C·max|aₖ| on sup_t |Σₖ aₖ·exp(−(t−k)²)|, where C is
/// the lattice-sum constant (≈ 1.7726). This is the bounded-kernel contrast:
/// an integrable kernel caps the supremum at a constant multiple of the
/// largest coefficient, independent of n.
pub fn bounded_kernel_sup_bound(coeffs: &CoefficientVector) -> f64 {
    gauss_lattice_constant() * coeffs.max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quasi(i: usize) -> f64 {
        const PHI: f64 = 0.618_033_988_749_894_9;
        (i as f64 * PHI).fract()
    }

    fn quasi_coeffs(n: usize, salt: usize) -> Vec<f64> {
        (0..n).map(|i| 2.0 * quasi(i * 7 + salt) - 1.0).collect()
    }

    /// Term-by-term reference: Σ aₖ·sinc(t−k) summed with the kernel function
    /// directly, independent of the folded fast form.
    fn direct_value(a: &[f64], t: f64) -> f64 {
        a.iter()
            .enumerate()
            .map(|(k0, &ak)| ak * kernel::sinc(t - (k0 + 1) as f64))
            .sum()
    }

    fn direct_derivative(a: &[f64], t: f64) -> f64 {
        a.iter()
            .enumerate()
            .map(|(k0, &ak)| ak * kernel::sinc_derivative(t - (k0 + 1) as f64))
            .sum()
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(CoefficientVector::new(vec![]).is_err());
        assert!(CoefficientVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(CoefficientVector::new(vec![1.0, f64::INFINITY]).is_err());
        let s = SincSeries::from_values(vec![1.0]).unwrap();
        assert!(s.evaluate(f64::NAN).is_err());
        assert!(s.evaluate_derivative(f64::INFINITY).is_err());
    }

    #[test]
    fn evaluate_known_points() {
        // both half-integer kernels add: 2·(2/π)
        let s = SincSeries::from_values(vec![1.0, 1.0]).unwrap();
        let v = s.evaluate(1.5).unwrap();
        assert!((v - 4.0 / PI).abs() < 1e-14, "v = {v}");

        // evenness of sinc makes the antisymmetric pair cancel at the midpoint
        let s = SincSeries::from_values(vec![1.0, -1.0]).unwrap();
        let v = s.evaluate(1.5).unwrap();
        assert!(v.abs() < 1e-14, "v = {v}");
    }

    #[test]
    fn interpolation_at_integers_is_exact() {
        for n in [1usize, 2, 7, 64, 513] {
            let a = quasi_coeffs(n, 3);
            let s = SincSeries::from_values(a.clone()).unwrap();
            for k in 1..=n {
                let v = s.evaluate(k as f64).unwrap();
                assert!((v - a[k - 1]).abs() <= 1e-12, "n={n} k={k}");
            }
            // integers outside the support evaluate to exactly 0
            assert_eq!(s.evaluate(0.0).unwrap(), 0.0);
            assert_eq!(s.evaluate(-3.0).unwrap(), 0.0);
            assert_eq!(s.evaluate((n + 5) as f64).unwrap(), 0.0);
        }
    }

    #[test]
    fn folded_form_matches_term_by_term_sum() {
        for n in [1usize, 2, 3, 17, 128] {
            let a = quasi_coeffs(n, 11);
            let s = SincSeries::from_values(a.clone()).unwrap();
            for i in 0..500 {
                let t = (quasi(i + 31) - 0.25) * (2.0 * n as f64);
                let fast = s.evaluate(t).unwrap();
                let slow = direct_value(&a, t);
                assert!(
                    (fast - slow).abs() <= 1e-11 * (1.0 + s.coefficients().sum_abs()),
                    "n={n} t={t} fast={fast} slow={slow}"
                );
                let dfast = s.evaluate_derivative(t).unwrap();
                let dslow = direct_derivative(&a, t);
                assert!(
                    (dfast - dslow).abs() <= 1e-10 * (1.0 + s.coefficients().sum_abs()),
                    "n={n} t={t} deriv"
                );
            }
        }
    }

    #[test]
    fn sign_symmetry_is_exact() {
        let n = 37;
        let a = quasi_coeffs(n, 5);
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        let s = SincSeries::from_values(a).unwrap();
        let sn = SincSeries::from_values(neg).unwrap();
        for i in 0..2_000 {
            let t = (quasi(i) - 0.25) * (2.0 * n as f64);
            assert_eq!(s.evaluate(t).unwrap(), -sn.evaluate(t).unwrap(), "t={t}");
        }
    }

    #[test]
    fn reflection_symmetry() {
        // reversing a mirrors the signal around (n+1)/2
        let n = 23;
        let a = quasi_coeffs(n, 9);
        let rev: Vec<f64> = a.iter().rev().copied().collect();
        let s = SincSeries::from_values(a).unwrap();
        let sr = SincSeries::from_values(rev).unwrap();
        for i in 0..2_000 {
            let t = (quasi(i) - 0.25) * (2.0 * n as f64);
            let v1 = s.evaluate(t).unwrap();
            let v2 = sr.evaluate((n + 1) as f64 - t).unwrap();
            assert!((v1 - v2).abs() <= 1e-12 * (1.0 + v1.abs()), "t={t} {v1} {v2}");
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let n = 41;
        let a = quasi_coeffs(n, 13);
        let s = SincSeries::from_values(a).unwrap();
        let h = 1e-5;
        for i in 0..1_000 {
            let t = (quasi(i + 7) - 0.25) * (2.0 * n as f64);
            let fd = (s.evaluate(t + h).unwrap() - s.evaluate(t - h).unwrap()) / (2.0 * h);
            let d = s.evaluate_derivative(t).unwrap();
            assert!((fd - d).abs() <= 1e-4 * (1.0 + d.abs()), "t={t} fd={fd} d={d}");
        }
    }

    #[test]
    fn offset_grid_matches_pointwise() {
        for n in [1usize, 2, 5, 16, 33, 250] {
            let a = quasi_coeffs(n, 17);
            let s = SincSeries::from_values(a).unwrap();
            let offsets = [0.5, 0.125, 0.9990234375, 1.0 / 3.0, 0.0009765625];
            let grid = s.evaluate_offset_grid(&offsets).unwrap();
            let (l_lo, l_hi) = grid.l_range();
            assert_eq!((l_lo, l_hi), (-(n as i64), 2 * n as i64));
            for (r, &off) in offsets.iter().enumerate() {
                for l in l_lo..=l_hi {
                    let fast = grid.value(l, r);
                    let slow = s.evaluate(l as f64 + off).unwrap();
                    assert!(
                        (fast - slow).abs() <= 1e-9,
                        "n={n} l={l} off={off} fast={fast} slow={slow}"
                    );
                }
            }
        }
    }

    #[test]
    fn offset_grid_example_point() {
        // n = 2, a = (1,1), l = 1, offset 0.5 → f(1.5) = 4/π
        let s = SincSeries::from_values(vec![1.0, 1.0]).unwrap();
        let grid = s.evaluate_offset_grid(&[0.5]).unwrap();
        assert!((grid.value(1, 0) - 4.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn offset_grid_rejects_bad_offsets() {
        let s = SincSeries::from_values(vec![1.0]).unwrap();
        assert!(s.evaluate_offset_grid(&[0.0]).is_err());
        assert!(s.evaluate_offset_grid(&[1.0]).is_err());
        assert!(s.evaluate_offset_grid(&[0.5, -0.125]).is_err());
    }

    #[test]
    fn fourier_baseline_basics() {
        let f = FourierBaseline::new(CoefficientVector::new(vec![1.0]).unwrap());
        assert!((f.evaluate(0.0).unwrap() - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(f.evaluate(1.25).is_err());
        assert!(f.evaluate(-0.1).is_err());
    }

    #[test]
    fn fourier_system_is_orthonormal_and_bounded() {
        // numeric quadrature of ∫ φ_j φ_k over [0,1], trapezoid on 20k points
        let m = 20_000usize;
        for j in 1..=6usize {
            for k in j..=6usize {
                let mut acc = 0.0;
                for i in 0..m {
                    let t = (i as f64 + 0.5) / m as f64;
                    let pj = std::f64::consts::SQRT_2 * (2.0 * PI * j as f64 * t).cos();
                    let pk = std::f64::consts::SQRT_2 * (2.0 * PI * k as f64 * t).cos();
                    acc += pj * pk / m as f64;
                }
                let expected = if j == k { 1.0 } else { 0.0 };
                assert!((acc - expected).abs() < 1e-8, "j={j} k={k} acc={acc}");
            }
        }
        // uniform bound √2
        for i in 0..10_000 {
            let t = quasi(i);
            let v = std::f64::consts::SQRT_2 * (2.0 * PI * 5.0 * t).cos();
            assert!(v.abs() <= std::f64::consts::SQRT_2 + 1e-15);
        }
    }

    #[test]
    fn fourier_sup_scan_brackets_dense_scan() {
        let a = quasi_coeffs(9, 23);
        let f = FourierBaseline::new(CoefficientVector::new(a).unwrap());
        let (lower, upper) = f.sup_scan();
        assert!(lower <= upper);
        // dense check on an unaligned finer grid
        let mut dense = 0.0f64;
        for i in 0..50_000 {
            let t = (i as f64 + 0.37) / 50_000.0;
            dense = dense.max(f.evaluate(t).unwrap().abs());
        }
        assert!(dense <= upper + 1e-12);
        assert!(lower <= dense + 1e-12);
    }

    #[test]
    fn bounded_kernel_constant_and_dominance() {
        // C for a single unit coefficient: the lattice sum Σ exp(−k²)
        let c = bounded_kernel_sup_bound(&CoefficientVector::new(vec![1.0]).unwrap());
        let mut lattice = 0.0;
        for k in -10i64..=10 {
            lattice += (-((k * k) as f64)).exp();
        }
        assert!((c - lattice).abs() < 1e-6, "c={c} lattice={lattice}");

        // dominance over a dense scan for a random vector
        let a = quasi_coeffs(40, 29);
        let cv = CoefficientVector::new(a).unwrap();
        let bound = bounded_kernel_sup_bound(&cv);
        for i in 0..200_000 {
            let t = -2.0 + 44.0 * (i as f64) / 200_000.0;
            let v = gaussian_kernel_value(&cv, t).abs();
            assert!(v <= bound, "t={t} v={v} bound={bound}");
        }
    }
}
