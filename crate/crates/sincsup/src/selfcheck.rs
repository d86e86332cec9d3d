//! Built-in consistency suites, exposed through the `selfcheck` CLI
//! subcommand so CI can validate an installed binary without a test harness.
//!
//! Three suites: the closed-form conditional sign expectation against its
//! brute-force enumeration, certified supremum enclosures against a dense
//! sampling oracle, and analytic derivatives against central differences.

use crate::discrete::{brute_force_sign_expectation, conditional_sign_expectation};
use crate::ensembles::{Ensemble, SplitMix64};
use crate::signal::SincSeries;
use crate::supbound::{certified_supremum, DEFAULT_CELL_BUDGET};

/// Outcome of one suite.
#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub detail: String,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Fixed seed so `selfcheck` is reproducible run to run.
const SELFCHECK_SEED: u64 = 0x5E1F_C4EC;

/// Runs every suite and returns their results in a fixed order.
pub fn run_all() -> Vec<SuiteResult> {
    vec![sign_expectation_suite(), enclosure_suite(), derivative_suite()]
}

/// |f| maximum over a dense grid on [−n, 2n] (`points_per_unit` samples per
/// unit), sharpened by golden-section refinement around the best grid point.
/// Every reported value is an actual sample of |f|, so the result is always
/// a valid lower bound on the true supremum, and after refinement it sits
/// within ~1e−12 of it — a practical oracle for enclosure tests.
pub fn dense_grid_supremum(series: &SincSeries, points_per_unit: usize) -> f64 {
    let n = series.n() as f64;
    let lo = -n;
    let steps = 3 * series.n() * points_per_unit;
    let step = 1.0 / points_per_unit as f64;
    let mut best = 0.0f64;
    let mut best_t = lo;
    for j in 0..=steps {
        let t = lo + j as f64 * step;
        let v = series.evaluate(t).expect("finite t").abs();
        if v > best {
            best = v;
            best_t = t;
        }
    }
    best.max(golden_max(series, best_t - step, best_t + step))
}

fn golden_max(series: &SincSeries, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.6180339887498949;
    let g = |t: f64| series.evaluate(t).expect("finite t").abs();
    let mut c = hi - (hi - lo) * INV_PHI;
    let mut d = lo + (hi - lo) * INV_PHI;
    let mut fc = g(c);
    let mut fd = g(d);
    for _ in 0..100 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - (hi - lo) * INV_PHI;
            fc = g(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + (hi - lo) * INV_PHI;
            fd = g(d);
        }
    }
    fc.max(fd)
}

/// Closed-form conditional sign expectation vs brute-force enumeration:
/// every p ≤ 12, every 1 ≤ k ≤ p, 100 random weight vectors each.
fn sign_expectation_suite() -> SuiteResult {
    let mut rng = SplitMix64::new(SELFCHECK_SEED);
    let mut cases = 0;
    let mut failures = 0;
    let mut detail = String::from("all (p ≤ 12, k, 100 random b) agree to 1e-12");
    for p in 1..=12usize {
        for k in 1..=p {
            for _ in 0..100 {
                let b: Vec<f64> = (0..p).map(|_| 4.0 * rng.next_open_unit() - 2.0).collect();
                let exact = conditional_sign_expectation(&b, k).expect("valid k");
                let brute = brute_force_sign_expectation(&b, k).expect("valid p, k");
                cases += 1;
                if (exact - brute).abs() > 1e-12 {
                    failures += 1;
                    if failures == 1 {
                        detail = format!(
                            "first mismatch at p = {p}, k = {k}: {exact} vs {brute}"
                        );
                    }
                }
            }
        }
    }
    SuiteResult { name: "sign-expectation-oracle", cases, failures, detail }
}

/// Certified enclosures vs the dense sampling oracle on small instances.
fn enclosure_suite() -> SuiteResult {
    let epsilon = 1e-6;
    let ensembles = [Ensemble::gaussian(1.0).expect("valid sigma"), Ensemble::rademacher()];
    let mut cases = 0;
    let mut failures = 0;
    let mut detail =
        String::from("dense-grid oracle inside every enclosure, width ≤ 1e-6 achieved");
    for n in [2usize, 3, 5, 8, 13] {
        for (e, ensemble) in ensembles.iter().enumerate() {
            for seed in 0..2u64 {
                let a = ensemble
                    .sample(n, SELFCHECK_SEED ^ (n as u64) << 8 ^ (e as u64) << 4 ^ seed)
                    .expect("n ≥ 1");
                let series = SincSeries::new(a);
                let est = certified_supremum(&series, epsilon, DEFAULT_CELL_BUDGET)
                    .expect("valid parameters");
                let oracle = dense_grid_supremum(&series, 10_000);
                cases += 1;
                let ok = est.achieved
                    && oracle >= est.lower - 1e-9
                    && oracle <= est.upper + 1e-9
                    && est.upper - est.lower <= epsilon;
                if !ok {
                    failures += 1;
                    if failures == 1 {
                        detail = format!(
                            "n = {n}, seed {seed}: oracle {oracle} vs [{}, {}], achieved {}",
                            est.lower, est.upper, est.achieved
                        );
                    }
                }
            }
        }
    }
    SuiteResult { name: "enclosure-vs-dense-grid", cases, failures, detail }
}

/// Analytic derivative vs central differences at random points.
fn derivative_suite() -> SuiteResult {
    let mut rng = SplitMix64::new(SELFCHECK_SEED.wrapping_add(1));
    let gaussian = Ensemble::gaussian(1.0).expect("valid sigma");
    let mut cases = 0;
    let mut failures = 0;
    let mut detail = String::from("analytic and central-difference derivatives agree");
    let h = 1e-5;
    for i in 0..200u64 {
        let n = 1 + (rng.next_u64() % 60) as usize;
        let a = gaussian.sample(n, SELFCHECK_SEED ^ (0xD00 + i)).expect("n ≥ 1");
        let series = SincSeries::new(a);
        let t = -(n as f64) + 3.0 * n as f64 * rng.next_open_unit();
        let analytic = series.evaluate_derivative(t).expect("finite t");
        let fd = (series.evaluate(t + h).expect("finite t")
            - series.evaluate(t - h).expect("finite t"))
            / (2.0 * h);
        cases += 1;
        // relative check with an absolute floor: near-zero derivatives are
        // dominated by the O(h²) difference error
        if (analytic - fd).abs() > 1e-4 * analytic.abs().max(1e-3) {
            failures += 1;
            if failures == 1 {
                detail = format!("n = {n}, t = {t}: analytic {analytic} vs central {fd}");
            }
        }
    }
    SuiteResult { name: "derivative-consistency", cases, failures, detail }
}
