//! Internal FFT-backed convolution engines.
//!
//! Three hot paths share this plumbing: evaluating the sinc series on offset
//! grids (one harmonic kernel per fractional offset), the discrete proxy
//! X = Y + Z (one harmonic convolution pair per coefficient vector), and the
//! Fourier-baseline grid scan. The direct O(n²) sums stay in their home
//! modules as oracles; every engine here is checked against them in tests.
//!
//! All transforms are complex f64 via rustfft. Real pairs are packed into one
//! complex sequence (g₁ + i·g₂ convolved against a real input yields both real
//! convolutions in the real/imaginary parts), halving transform counts.

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Smallest 5-smooth length ≥ `min` of the form m·2^a, m ∈ {1,3,5,9,15,25}.
/// Keeps rustfft on fast mixed-radix plans without jumping to the next power
/// of two (a 1.6× saving at the sizes the sweeps use).
fn good_fft_len(min: usize) -> usize {
    let mut best = usize::MAX;
    for m in [1usize, 3, 5, 9, 15, 25] {
        let mut v = m;
        while v < min {
            v *= 2;
        }
        best = best.min(v);
    }
    best
}

struct FftPair {
    len: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl FftPair {
    fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        FftPair {
            len,
            fwd: planner.plan_fft_forward(len),
            inv: planner.plan_fft_inverse(len),
        }
    }

    /// Pointwise product of the two spectra, transformed back (unscaled; the
    /// caller folds the 1/len into its own output scaling).
    fn inverse_product(&self, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let mut prod: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        self.inv.process(&mut prod);
        prod
    }
}

/// Values of f(l + t) = Σₖ aₖ sinc(l + t − k) for every integer l ∈ [−n, 2n]
/// and a fixed list of fractional offsets t ∈ (0,1).
///
/// Uses the exact identity sin(π(l + t − k)) = (−1)^(l−k) sin(πt), which turns
/// each offset row into a linear convolution of bₖ = (−1)^k aₖ against the
/// harmonic kernel g_j = 1/(j + t), j ∈ [−2n, 2n]. A cyclic FFT of length
/// ≥ 4n + 2 leaves the needed output window [l = −n .. 2n] alias-free.
///
/// Kernel spectra depend only on (n, offsets), so one engine can be shared
/// across many coefficient vectors of the same length; results are bitwise
/// identical to a freshly built engine.
pub(crate) struct OffsetGridEngine {
    n: usize,
    fft: FftPair,
    /// Packed kernel spectra: each entry covers one or two consecutive input
    /// offsets (second offset in the imaginary channel).
    pairs: Vec<KernelPairSpectrum>,
}

struct KernelPairSpectrum {
    offsets: (f64, Option<f64>),
    spectrum: Vec<Complex64>,
}

impl OffsetGridEngine {
    /// `offsets` must each lie in the open interval (0,1); caller validates.
    pub fn new(n: usize, offsets: &[f64]) -> Self {
        let fft = FftPair::new(good_fft_len(4 * n + 2));
        let mut pairs = Vec::with_capacity(offsets.len().div_ceil(2));
        for chunk in offsets.chunks(2) {
            let t1 = chunk[0];
            let t2 = chunk.get(1).copied();
            let mut data = vec![Complex64::new(0.0, 0.0); fft.len];
            // kernel index jj = j + 2n for j ∈ [−2n, 2n]
            for (jj, slot) in data.iter_mut().enumerate().take(4 * n + 1) {
                let j = jj as f64 - 2.0 * n as f64;
                let re = 1.0 / (j + t1);
                let im = t2.map_or(0.0, |t| 1.0 / (j + t));
                *slot = Complex64::new(re, im);
            }
            fft.fwd.process(&mut data);
            pairs.push(KernelPairSpectrum {
                offsets: (t1, t2),
                spectrum: data,
            });
        }
        OffsetGridEngine { n, fft, pairs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// Offsets covered by one packed pair, in input order.
    pub fn pair_offsets(&self, pair_index: usize) -> (f64, Option<f64>) {
        self.pairs[pair_index].offsets
    }

    /// Forward transform of bₖ = (−1)^k aₖ, reusable across every pair of this
    /// engine (one transform per coefficient vector instead of one per offset).
    pub fn coefficient_spectrum(&self, coeffs: &[f64]) -> Vec<Complex64> {
        assert_eq!(coeffs.len(), self.n);
        let mut b = vec![Complex64::new(0.0, 0.0); self.fft.len];
        for (k0, &a) in coeffs.iter().enumerate() {
            // b_k = (−1)^k a_k with k = k0 + 1
            let s = if k0 % 2 == 0 { -1.0 } else { 1.0 };
            b[k0] = Complex64::new(s * a, 0.0);
        }
        self.fft.fwd.process(&mut b);
        b
    }

    /// Rows of f(l + offset) for l = −n..=2n for the (one or two) offsets of
    /// one packed pair. Streaming pair-by-pair keeps peak memory at two rows
    /// regardless of how many offsets the engine holds.
    pub fn pair_rows(
        &self,
        coeff_spectrum: &[Complex64],
        pair_index: usize,
    ) -> (Vec<f64>, Option<Vec<f64>>) {
        let n = self.n;
        let pair = &self.pairs[pair_index];
        let conv = self.fft.inverse_product(coeff_spectrum, &pair.spectrum);
        let scale1 = (PI * pair.offsets.0).sin() / PI / self.fft.len as f64;
        let scale2 = pair.offsets.1.map(|t| (PI * t).sin() / PI / self.fft.len as f64);
        let rows_len = 3 * n + 1;
        let mut row1 = Vec::with_capacity(rows_len);
        let mut row2 = scale2.map(|_| Vec::with_capacity(rows_len));
        for idx in 0..rows_len {
            let l = idx as i64 - n as i64;
            let parity = if l.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            // linear conv index for row l is m = l + 2n − 1 = idx + n − 1
            let c = conv[idx + n - 1];
            row1.push(parity * scale1 * c.re);
            if let (Some(r2), Some(s2)) = (row2.as_mut(), scale2) {
                r2.push(parity * s2 * c.im);
            }
        }
        (row1, row2)
    }

    /// Rows of f(l + offset) for l = −n..=2n, one Vec per input offset, in the
    /// order the offsets were given to `new`.
    pub fn rows(&self, coeffs: &[f64]) -> Vec<Vec<f64>> {
        let b = self.coefficient_spectrum(coeffs);
        let mut out = Vec::new();
        for p in 0..self.pairs.len() {
            let (row1, row2) = self.pair_rows(&b, p);
            out.push(row1);
            if let Some(r2) = row2 {
                out.push(r2);
            }
        }
        out
    }
}

/// Harmonic convolutions behind the discrete proxy fast path.
///
/// With h_l = 1/l (l = 1..n), C_x[m] = Σ_{l+i=m} h_l x_i, and ā the reversal
/// of a, the proxy components are
///   Y_k = C_a[k+1]   and   Z_k = C_ā[n+2−k] − a_k,
/// so one packed transform of a + i·ā gives both (spectra of h are cached per
/// engine and reusable across coefficient vectors of the same n).
pub(crate) struct HarmonicProxyEngine {
    n: usize,
    fft: FftPair,
    h_spectrum: Vec<Complex64>,
}

impl HarmonicProxyEngine {
    pub fn new(n: usize) -> Self {
        // linear support of the 0-based conv index is [1, 2n−1]
        let fft = FftPair::new(good_fft_len(2 * n.max(1)));
        let mut h = vec![Complex64::new(0.0, 0.0); fft.len];
        for l in 1..=n.min(fft.len - 1) {
            h[l] = Complex64::new(1.0 / l as f64, 0.0);
        }
        fft.fwd.process(&mut h);
        HarmonicProxyEngine { n, fft, h_spectrum: h }
    }

    /// Returns (y, z) with y_k = Σ_{l=1..k} a_{k−l+1}/l and
    /// z_k = Σ_{l=2..n−k+1} a_{l+k−1}/l, both 0-indexed by k−1.
    pub fn components(&self, a: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        assert_eq!(a.len(), n);
        if n == 1 {
            // conv machinery degenerates at n = 1; the sums are trivial
            return (vec![a[0]], vec![0.0]);
        }
        let mut packed = vec![Complex64::new(0.0, 0.0); self.fft.len];
        for i0 in 0..n {
            packed[i0] = Complex64::new(a[i0], a[n - 1 - i0]);
        }
        self.fft.fwd.process(&mut packed);
        let conv = self.fft.inverse_product(&packed, &self.h_spectrum);
        let scale = 1.0 / self.fft.len as f64;

        let mut y = Vec::with_capacity(n);
        let mut z = Vec::with_capacity(n);
        for k in 1..=n {
            // 0-based conv index for C_x[m] is m − 1
            y.push(conv[k].re * scale);
            let c_rev = conv[n + 1 - k].im * scale;
            z.push(c_rev - a[k - 1]);
        }
        (y, z)
    }
}

/// √2·Σₖ aₖ cos(2πk·j/m) for j = 0..m−1 — the Fourier-baseline partial sum on
/// a uniform grid of [0,1), via one length-m DFT.
pub(crate) fn fourier_grid_values(coeffs: &[f64], m: usize) -> Vec<f64> {
    assert!(m > coeffs.len(), "grid must resolve every harmonic");
    let mut data = vec![Complex64::new(0.0, 0.0); m];
    for (k0, &a) in coeffs.iter().enumerate() {
        data[k0 + 1] = Complex64::new(a, 0.0);
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut data);
    data.iter().map(|c| std::f64::consts::SQRT_2 * c.re).collect()
}
