//! Global suprema of |f| for the shifted-sinc series: a certified
//! branch-and-bound enclosure, a fast grid heuristic, and the two closed-form
//! bounds (coarse grid + analytic slack above, half-integer samples below).
//!
//! Everything works on the restriction to [−n, 2n]. Outside that window
//! |f(t)| ≤ max|aₖ|·(1/π)·Σ_{j=n+1}^{2n} 1/j < max|aₖ|·ln(2)/π ≈ 0.22·max|aₖ|,
//! while sampling any integer in the support already yields max|aₖ| itself, so
//! the global supremum is always attained inside the window.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fftconv::OffsetGridEngine;
use crate::kernel::KernelEnvelope;
use crate::signal::SincSeries;

/// Additive slack, in units of max|aₖ|, that upgrades a grid maximum at
/// density 1/n to a valid bound on the true supremum: 2·max|aₖ| covers the
/// near-integer zones the grid skips and 4·max|aₖ| covers derivative drift
/// between grid nodes.
const GRID_SLACK_MULTIPLIER: f64 = 6.0;

/// Default certification target: 1e−4 relative to the coefficient scale
/// (with a tiny absolute floor so the all-zero vector stays valid).
pub fn default_epsilon(max_abs_coeff: f64) -> f64 {
    (1e-4 * max_abs_coeff).max(1e-12)
}

pub const DEFAULT_CELL_BUDGET: usize = 1_000_000;

/// A certified (or heuristically bracketed) enclosure of sup_t |f(t)|.
#[derive(Debug, Clone, Serialize)]
pub struct SupEstimate {
    /// Largest |f| value actually evaluated — always attained.
    pub lower: f64,
    /// A point t with |f(witness)| = lower.
    pub witness: f64,
    /// Valid upper bound on the supremum.
    pub upper: f64,
    /// The requested enclosure width ε for the certified solver; for the
    /// heuristic, the (loose) slack upper − lower it reports.
    pub tolerance: f64,
    /// Cells created by the certified solver, or grid points scanned by the
    /// heuristic.
    pub cells_processed: u64,
    /// Whether upper − lower ≤ tolerance was reached. Always false for the
    /// heuristic, whose upper bound is not meant to be tight.
    pub achieved: bool,
}

/// Exact nearest-shift window half-width for the per-cell derivative bound:
/// the 64 shifts closest to a cell are summed exactly, the rest through
/// integral tail bounds.
const EXACT_WINDOW: i64 = 32;

struct Cell {
    lo: f64,
    hi: f64,
    upper: f64,
    /// Inclusive 1-based coefficient range summed exactly, inherited from the
    /// seed cell so that child bounds are monotone under refinement.
    window: (i64, i64),
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.upper == other.upper && self.lo == other.lo
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    // max-heap on the cell upper bound; ties pop the smaller left endpoint
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper
            .total_cmp(&other.upper)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

/// Per-series scaffolding for the cell derivative bound
/// D(cell) = Σₖ |aₖ|·envelope(cell − k).
struct EnvelopeSummer<'a> {
    a: &'a [f64],
    /// prefix_max[i] = max(|a₁|..|a_i|), prefix_max[0] = 0
    prefix_max: Vec<f64>,
    /// suffix_max[i] = max(|a_i|..|a_n|), suffix_max[n+1] = 0 (1-based)
    suffix_max: Vec<f64>,
    env: &'static KernelEnvelope,
}

/// Bound on Σ_{j=0}^{count−1} far_bound(dmin + j) for the envelope
/// far form 1/x + 1/(πx²): the harmonic part by first term + integral
/// comparison, the square part by its full integral tail.
fn far_tail_bound(dmin: f64, count: usize) -> f64 {
    debug_assert!(dmin >= 1.0 && count >= 1);
    let c = count as f64;
    let harmonic = 1.0 / dmin + ((dmin + c - 1.0) / dmin).ln();
    let squares = (1.0 / (dmin * dmin) + 1.0 / dmin) / std::f64::consts::PI;
    harmonic + squares
}

impl<'a> EnvelopeSummer<'a> {
    fn new(a: &'a [f64]) -> Self {
        let n = a.len();
        let mut prefix_max = vec![0.0f64; n + 1];
        for i in 1..=n {
            prefix_max[i] = prefix_max[i - 1].max(a[i - 1].abs());
        }
        let mut suffix_max = vec![0.0f64; n + 2];
        for i in (1..=n).rev() {
            suffix_max[i] = suffix_max[i + 1].max(a[i - 1].abs());
        }
        EnvelopeSummer {
            a,
            prefix_max,
            suffix_max,
            env: KernelEnvelope::standard(),
        }
    }

    /// Window for a seed cell [l, l+1]: the EXACT_WINDOW shifts on each side,
    /// clipped to the support. Tail distances then start at ≥ EXACT_WINDOW.
    /// A cell farther than EXACT_WINDOW from the whole support gets an empty
    /// window in canonical form — (1, 0) left of the support puts every shift
    /// in the suffix tail, (n+1, n) right of it puts every shift in the
    /// prefix tail — so `derivative_sum_bound` weighs the full tail instead
    /// of indexing outside the max arrays.
    fn seed_window(&self, l: i64) -> (i64, i64) {
        let n = self.a.len() as i64;
        let w_lo = (l - EXACT_WINDOW + 1).max(1);
        let w_hi = (l + EXACT_WINDOW).min(n);
        if w_lo > w_hi {
            if l + EXACT_WINDOW < 1 {
                (1, 0)
            } else {
                (n + 1, n)
            }
        } else {
            (w_lo, w_hi)
        }
    }

    /// Upper bound on sup_{t∈[lo,hi]} |f′(t)| = |Σ aₖ sinc′(t−k)|, monotone
    /// under interval inclusion for a fixed window.
    fn derivative_sum_bound(&self, lo: f64, hi: f64, window: (i64, i64)) -> f64 {
        let n = self.a.len() as i64;
        let (w_lo, w_hi) = window;
        let mut total = 0.0;
        for k in w_lo..=w_hi {
            let ak = self.a[(k - 1) as usize].abs();
            if ak != 0.0 {
                total += ak * self.env.derivative_bound(lo - k as f64, hi - k as f64);
            }
        }
        if w_lo > 1 {
            // shifts k = 1..w_lo−1 sit at distances ≥ lo − (w_lo − 1)
            let count = (w_lo - 1) as usize;
            let dmin = lo - (w_lo - 1) as f64;
            total += self.prefix_max[count] * far_tail_bound(dmin, count);
        }
        if w_hi < n {
            // shifts k = w_hi+1..n sit at distances ≥ (w_hi + 1) − hi
            let count = (n - w_hi) as usize;
            let dmin = (w_hi + 1) as f64 - hi;
            total += self.suffix_max[(w_hi + 1) as usize] * far_tail_bound(dmin, count);
        }
        // absorb accumulation rounding into the certificate
        total * (1.0 + 1e-12)
    }
}

/// Best-first branch-and-bound enclosure of sup_t |f(t)|.
///
/// Seeds one cell per unit interval [l, l+1], l = −n..2n−1, plus exact integer
/// samples. Each cell carries upper = max(|f| at endpoints and midpoint) +
/// (half-width)·D with D the per-cell derivative bound; the cell with the
/// largest upper is bisected until upper − lower ≤ epsilon or the budget is
/// spent. Cells that can no longer split in floating point freeze and keep
/// contributing their bound.
pub fn certified_supremum(
    series: &SincSeries,
    epsilon: f64,
    cell_budget: usize,
) -> Result<SupEstimate> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::validation(format!(
            "certified_supremum: epsilon must be a positive finite real, got {epsilon}"
        )));
    }
    let n = series.n();
    let seed_count = 3 * n;
    if cell_budget < seed_count {
        return Err(Error::validation(format!(
            "certified_supremum: cell_budget {cell_budget} cannot cover the {seed_count} seed cells"
        )));
    }

    let summer = EnvelopeSummer::new(series.coefficients().values());
    let mut lower = 0.0f64;
    let mut witness = -(n as f64);
    let sample = |t: f64, lower: &mut f64, witness: &mut f64| -> f64 {
        let v = series.evaluate(t).expect("finite t").abs();
        if v > *lower {
            *lower = v;
            *witness = t;
        }
        v
    };

    let mut heap = BinaryHeap::with_capacity(seed_count + 64);
    for l in -(n as i64)..(2 * n as i64) {
        let lo = l as f64;
        let hi = lo + 1.0;
        let mid = lo + 0.5;
        let smax = sample(lo, &mut lower, &mut witness)
            .max(sample(mid, &mut lower, &mut witness))
            .max(sample(hi, &mut lower, &mut witness));
        let window = summer.seed_window(l);
        let d = summer.derivative_sum_bound(lo, hi, window);
        heap.push(Cell {
            lo,
            hi,
            upper: smax + 0.5 * d,
            window,
        });
    }
    let mut cells_processed = seed_count as u64;
    let budget = cell_budget as u64;
    let mut frozen_upper = 0.0f64;

    let (upper, achieved) = loop {
        let Some(top) = heap.pop() else {
            // every cell collapsed to floating-point resolution
            let u = frozen_upper.max(lower);
            break (u, u - lower <= epsilon);
        };
        let current_upper = top.upper.max(frozen_upper).max(lower);
        if current_upper - lower <= epsilon {
            break (current_upper, true);
        }
        if cells_processed + 2 > budget {
            break (current_upper, false);
        }
        let mid = 0.5 * (top.lo + top.hi);
        if !(top.lo < mid && mid < top.hi) {
            frozen_upper = frozen_upper.max(top.upper);
            continue;
        }
        for (clo, chi) in [(top.lo, mid), (mid, top.hi)] {
            let cmid = 0.5 * (clo + chi);
            let smax = sample(clo, &mut lower, &mut witness)
                .max(sample(cmid, &mut lower, &mut witness))
                .max(sample(chi, &mut lower, &mut witness));
            let d = summer.derivative_sum_bound(clo, chi, top.window);
            // the parent bound stays valid for the child, so clamping keeps
            // the global bound monotone as the budget grows
            let upper = (smax + 0.5 * (chi - clo) * d).min(top.upper);
            cells_processed += 1;
            heap.push(Cell {
                lo: clo,
                hi: chi,
                upper,
                window: top.window,
            });
        }
    };

    Ok(SupEstimate {
        lower,
        witness,
        upper,
        tolerance: epsilon,
        cells_processed,
        achieved,
    })
}

/// One grid-scan + refinement pass at a fixed density, using a prebuilt
/// engine so sweeps can amortize kernel spectra across trials.
pub(crate) fn heuristic_pass(
    series: &SincSeries,
    points_per_unit: usize,
    engine: &OffsetGridEngine,
) -> SupEstimate {
    let n = series.n();
    let a = series.coefficients().values();
    let max_abs = series.coefficients().max_abs();
    let keep = if n > 4096 { 4 } else { 16 };

    // top candidates (|f|, t), smallest kept value replaced on overflow
    let mut candidates: Vec<(f64, f64)> = Vec::with_capacity(keep);
    let offer = |v: f64, t: f64, candidates: &mut Vec<(f64, f64)>| {
        if candidates.len() < keep {
            candidates.push((v, t));
        } else {
            let (i_min, &(v_min, _)) = candidates
                .iter()
                .enumerate()
                .min_by(|x, y| x.1 .0.total_cmp(&y.1 .0))
                .expect("nonempty");
            if v > v_min {
                candidates[i_min] = (v, t);
            }
        }
    };

    // integer grid points: |f(k)| = |a_k| inside the support, 0 outside
    for (k0, &ak) in a.iter().enumerate() {
        offer(ak.abs(), (k0 + 1) as f64, &mut candidates);
    }
    let mut scanned = (3 * n + 1) as u64;

    let spectrum = engine.coefficient_spectrum(a);
    for p in 0..engine.pair_count() {
        let (row1, row2) = engine.pair_rows(&spectrum, p);
        let (t1, t2) = engine.pair_offsets(p);
        for (row, t_off) in std::iter::once((&row1, t1))
            .chain(row2.as_ref().map(|r| (r, t2.expect("paired offset"))))
        {
            for (idx, &v) in row.iter().enumerate() {
                let t = (idx as i64 - n as i64) as f64 + t_off;
                offer(v.abs(), t, &mut candidates);
            }
            scanned += row.len() as u64;
        }
    }

    // refine each candidate by sign bisection of φ = f·f′ (the sign of
    // d|f|/dt wherever f ≠ 0) on the bracketing grid cell
    candidates.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.total_cmp(&y.1)));
    let h = 1.0 / points_per_unit as f64;
    let mut best = (0.0f64, -(n as f64));
    let consider = |t: f64, best: &mut (f64, f64)| {
        let v = series.evaluate(t).expect("finite t").abs();
        if v > best.0 {
            *best = (v, t);
        }
    };
    for &(_, t0) in &candidates {
        consider(t0, &mut best);
        let mut lo = t0 - h;
        let mut hi = t0 + h;
        let phi = |t: f64| {
            series.evaluate(t).expect("finite t") * series.evaluate_derivative(t).expect("finite t")
        };
        if phi(lo) > 0.0 && phi(hi) < 0.0 {
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if phi(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        consider(lo, &mut best);
        consider(hi, &mut best);
        consider(0.5 * (lo + hi), &mut best);
    }

    let slack = GRID_SLACK_MULTIPLIER * max_abs;
    SupEstimate {
        lower: best.0,
        witness: best.1,
        upper: best.0 + slack,
        tolerance: slack,
        cells_processed: scanned,
        achieved: false,
    }
}

pub(crate) fn density_offsets(points_per_unit: usize) -> Vec<f64> {
    (1..points_per_unit)
        .map(|r| r as f64 / points_per_unit as f64)
        .collect()
}

/// Grid scan of |f| on [−n, 2n] at the given density (integers plus the
/// points l + r/points_per_unit), refined by 60 rounds of derivative-sign
/// bisection around the best grid points. The returned upper bound is
/// lower + 6·max|aₖ| — valid but loose, so `achieved` is always false.
pub fn heuristic_supremum(series: &SincSeries, points_per_unit: usize) -> Result<SupEstimate> {
    if points_per_unit < 2 {
        return Err(Error::validation(format!(
            "heuristic_supremum: points_per_unit must be ≥ 2, got {points_per_unit}"
        )));
    }
    let engine = OffsetGridEngine::new(series.n(), &density_offsets(points_per_unit));
    Ok(heuristic_pass(series, points_per_unit, &engine))
}

pub(crate) const AUTO_DENSITIES: [usize; 4] = [16, 32, 64, 128];

/// Automatic-density heuristic, with caller-supplied engines (sweeps cache
/// them per signal length). Densities double from 16 until the refined
/// maximum moves by less than 1e−3 relative, capped at 128.
pub(crate) fn heuristic_auto_with(
    series: &SincSeries,
    mut engine_for: impl FnMut(usize) -> std::sync::Arc<OffsetGridEngine>,
) -> SupEstimate {
    let mut best: Option<SupEstimate> = None;
    let mut scanned = 0u64;
    let mut previous = f64::NAN;
    for ppu in AUTO_DENSITIES {
        let pass = heuristic_pass(series, ppu, &engine_for(ppu));
        scanned += pass.cells_processed;
        let current = pass.lower;
        let improved = match &best {
            Some(b) => pass.lower > b.lower,
            None => true,
        };
        if improved {
            best = Some(pass);
        }
        if !previous.is_nan() && (current - previous).abs() <= 1e-3 * current.abs() {
            break;
        }
        previous = current;
    }
    let mut est = best.expect("at least one density ran");
    est.cells_processed = scanned;
    est.upper = est.lower + est.tolerance;
    est
}

/// `heuristic_supremum` with the density chosen automatically (16 doubling to
/// at most 128, stopping when the refined maximum stabilizes to 1e−3).
pub fn heuristic_supremum_auto(series: &SincSeries) -> Result<SupEstimate> {
    Ok(heuristic_auto_with(series, |ppu| {
        std::sync::Arc::new(OffsetGridEngine::new(series.n(), &density_offsets(ppu)))
    }))
}

/// One-shot grid bound: max over l = −n..2n−1 and r = 1..n−1 of |f(l + r/n)|,
/// plus the analytic slack 6·max|aₖ|. Loose but closed-form; always at least
/// the certified upper bound minus the certification width.
pub fn coarse_grid_upper_bound(series: &SincSeries) -> Result<f64> {
    let n = series.n();
    if n < 2 {
        return Err(Error::validation(
            "coarse_grid_upper_bound: needs n ≥ 2 so the offset grid r/n, r = 1..n−1 is nonempty",
        ));
    }
    let offsets: Vec<f64> = (1..n).map(|r| r as f64 / n as f64).collect();
    let engine = OffsetGridEngine::new(n, &offsets);
    let spectrum = engine.coefficient_spectrum(series.coefficients().values());
    let mut grid_max = 0.0f64;
    for p in 0..engine.pair_count() {
        let (row1, row2) = engine.pair_rows(&spectrum, p);
        // rows cover l = −n..2n; the bound's grid stops at l = 2n−1
        for row in std::iter::once(&row1).chain(row2.as_ref()) {
            for &v in &row[..3 * n] {
                grid_max = grid_max.max(v.abs());
            }
        }
    }
    Ok(grid_max + GRID_SLACK_MULTIPLIER * series.coefficients().max_abs())
}

/// Largest |f| over the half-integer points 2l + 1/2, l = 0..⌊(n−1)/2⌋ —
/// the sparse sample grid behind the lower-bound argument. Always ≤ the true
/// supremum since every value is attained.
pub fn half_integer_lower_bound(series: &SincSeries) -> f64 {
    let n = series.n();
    let mut best = 0.0f64;
    for l in 0..=((n - 1) / 2) {
        let t = 2.0 * l as f64 + 0.5;
        best = best.max(series.evaluate(t).expect("finite t").abs());
    }
    best
}
