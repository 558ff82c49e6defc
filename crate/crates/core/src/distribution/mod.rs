//! Limiting gap density of the normalized L, its CDF, and the region volumes of the section.

mod dilog;
mod volume;

use std::f64::consts::{LN_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::numfield::{rat, QSqrt2};
use crate::quad::{integrate, integrate_log, QuadOptions, QuadResult};

pub use dilog::dilog;
pub use volume::{ae_printed_limit_volume, covolume_total, region_volume, Method, VolumeEstimate};

/// Lower ends of the seven density pieces (the first is the support edge).
pub fn breakpoints_exact() -> [QSqrt2; 7] {
    [
        QSqrt2::from_ints(1, 0),
        QSqrt2::from_ints(0, 1),
        QSqrt2::from_ints(0, 2),
        QSqrt2::from_ints(2, 1),
        QSqrt2::from_ints(4, 0),
        QSqrt2::from_ints(0, 4),
        QSqrt2::from_ints(3, 2),
    ]
}

pub const BREAKPOINTS: [f64; 7] = [1.0, SQRT_2, 2.0 * SQRT_2, 2.0 + SQRT_2, 4.0, 4.0 * SQRT_2, 5.828_427_124_746_19];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdfPiece {
    pub piece_id: u8,
    pub lo: QSqrt2,
    /// `None` for the unbounded last piece.
    pub hi: Option<QSqrt2>,
}

pub fn pieces() -> Vec<PdfPiece> {
    let b = breakpoints_exact();
    (0..7).map(|i| PdfPiece { piece_id: i as u8 + 1, lo: b[i].clone(), hi: b.get(i + 1).cloned() }).collect()
}

/// Exact piece lookup; `0` below the support.
pub fn piece_id_exact(t: &QSqrt2) -> u8 {
    breakpoints_exact().iter().filter(|b| *b <= t).count() as u8
}

/// Piece containing `t` (intervals closed on the left); `0` below the support.
pub fn pdf_piece_id(t: f64) -> u8 {
    BREAKPOINTS.iter().filter(|&&b| b <= t).count() as u8
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistConstants {
    pub measure_const: f64,
    pub covolume: f64,
    pub domain_area: f64,
    pub octagon_scale: f64,
    /// Mean return time `covolume · measure_const`.
    pub mean_return_time: f64,
}

pub fn constants() -> DistConstants {
    let d = 3.0 + SQRT_2;
    DistConstants {
        measure_const: 2.0 / d,
        covolume: 3.0 * PI * PI / 4.0,
        domain_area: d / 2.0,
        octagon_scale: 2f64.powf(-0.25),
        mean_return_time: 3.0 * PI * PI / (2.0 * d),
    }
}

/// `(2/(3+√2))·((3+√2)/2)` evaluated in Q(√2).
pub fn measure_times_area_exact() -> QSqrt2 {
    let d = QSqrt2::from_ints(3, 1);
    let m = QSqrt2::from(2).checked_div(&d).expect("nonzero");
    let area = d * QSqrt2::from_rational(rat(1, 2));
    m * area
}

/// `atanh(√(1 − c))` for `c ∈ (0, 1]`, written as `ln((1 + s)/√c)` to stay accurate as `c → 0`.
fn atanh_sqrt_one_minus(c: f64) -> f64 {
    let one_minus = 1.0 - c;
    assert!(c > 0.0 && one_minus > -4.0 * f64::EPSILON, "atanh argument outside its piece: c = {c}");
    let s = one_minus.max(0.0).sqrt();
    ((1.0 + s) / c.sqrt()).ln()
}

/// Density of the limiting gap distribution.
pub fn pdf(t: f64) -> f64 {
    let id = pdf_piece_id(t);
    if id == 0 {
        return 0.0;
    }
    piece_value(id, t)
}

fn piece_value(id: u8, t: f64) -> f64 {
    let den = (3.0 + SQRT_2) * t * t;
    let l = t.ln();
    match id {
        1 | 4 => 8.0 * l / den,
        2 => (10.0 * l - LN_2) / den,
        3 => -(4.0 * atanh_sqrt_one_minus(2.0 * SQRT_2 / t) + LN_2 - 10.0 * l) / den,
        5 => -(12.0 * atanh_sqrt_one_minus(4.0 / t) - 8.0 * l) / den,
        6 => -4.0 * (3.0 * atanh_sqrt_one_minus(4.0 / t) + 2.0 * (atanh_sqrt_one_minus(4.0 * SQRT_2 / t) - l)) / den,
        7 => {
            let x = 4.0 * SQRT_2 / t;
            let s = (1.0 - x).max(0.0).sqrt();
            let one_minus_s = x / (1.0 + s);
            -(24.0 * atanh_sqrt_one_minus(4.0 / t) + 6.0 * LN_2 - 16.0 * l + 4.0 * (0.5 * (1.0 + s)).ln()
                - 4.0 * one_minus_s.ln())
                / (2.0 * den)
        }
        _ => unreachable!("piece id {id}"),
    }
}

/// Piece formula evaluated at any `t` inside its interval's closure; used for one-sided limits.
pub fn pdf_piece(id: u8, t: f64) -> f64 {
    piece_value(id, t)
}

pub const TAIL_CUTOFF: f64 = 1e6;
const CDF_OPTS: QuadOptions = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-13, max_panels: 4000 };

fn integrate_pdf(lo: f64, hi: f64) -> QuadResult {
    let mut acc = QuadResult { value: 0.0, error: 0.0, evals: 0 };
    let mut edges: Vec<f64> = BREAKPOINTS.iter().copied().filter(|&b| b > lo && b < hi).collect();
    edges.insert(0, lo);
    edges.push(hi);
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        acc = acc
            + if b / a > 4.0 { integrate_log(pdf, a, b, &[], CDF_OPTS) } else { integrate(pdf, a, b, &[], CDF_OPTS) };
    }
    acc
}

/// `P(gap ≤ t)`, by adaptive quadrature with the breakpoints as panel edges.
pub fn cdf(t: f64) -> f64 {
    cdf_with_error(t).value
}

pub fn cdf_with_error(t: f64) -> QuadResult {
    if t <= 1.0 {
        return QuadResult { value: 0.0, error: 0.0, evals: 0 };
    }
    integrate_pdf(1.0, t)
}

/// CDF at every point of `ts` (any order), accumulating over sorted neighbours.
pub fn cdf_many(ts: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.sort_by(|&i, &j| ts[i].total_cmp(&ts[j]));
    let mut out = vec![0.0; ts.len()];
    let mut last_t = 1.0;
    let mut acc = 0.0;
    for i in order {
        let t = ts[i];
        if t > last_t {
            acc += integrate_pdf(last_t, t).value;
            last_t = t;
        }
        out[i] = if t <= 1.0 { 0.0 } else { acc.min(1.0) };
    }
    out
}

/// Smallest `t` with `cdf(t) ≥ p`, for `p ∈ [0, 1)`.
pub fn quantile(p: f64) -> f64 {
    assert!((0.0..1.0).contains(&p), "quantile level must lie in [0, 1)");
    if p == 0.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (1.0, 2.0);
    while cdf(hi) < p {
        lo = hi;
        hi *= 2.0;
    }
    // Newton inside the bracket, falling back to bisection when a step leaves it.
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let c = cdf(t);
        if c < p {
            lo = t;
        } else {
            hi = t;
        }
        if (c - p).abs() < 1e-15 || hi - lo <= 1e-15 * hi {
            break;
        }
        let d = pdf(t);
        let newton = if d > 0.0 { t + (p - c) / d } else { f64::NAN };
        t = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    t
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassReport {
    pub cutoff: f64,
    pub integral: f64,
    pub quad_error: f64,
    /// Bound on `∫_T^∞ f` from `f(t) ≤ C/t²`, `C = T²·f(T)`.
    pub tail_bound: f64,
}

impl MassReport {
    pub fn total_error_bound(&self) -> f64 {
        self.quad_error + self.tail_bound
    }
}

/// `∫_1^T f` plus a bound `C(1 + ln T)/T` on the remainder.
pub fn total_mass(cutoff: f64) -> MassReport {
    let r = integrate_pdf(1.0, cutoff);
    let c = cutoff * cutoff * pdf(cutoff);
    MassReport { cutoff, integral: r.value, quad_error: r.error, tail_bound: c * (1.0 + cutoff.ln()) / cutoff }
}

/// Density of the gaps after scaling all holonomy by `c`: `f(t/c²)/c⁴`.
pub fn rescale_pdf(c: f64, t: f64) -> f64 {
    assert!(c > 0.0, "scale must be positive");
    let c2 = c * c;
    pdf(t / c2) / (c2 * c2)
}

/// Octagon gap density, `rescale_pdf` at `c = 2^{-1/4}`.
pub fn octagon_pdf(t: f64) -> f64 {
    rescale_pdf(constants().octagon_scale, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn below_and_at_support() {
        assert_eq!(pdf(0.5), 0.0);
        assert_eq!(pdf(1.0), 0.0);
        assert_eq!(pdf(-3.0), 0.0);
        let want = 8.0 * SQRT_2.ln() / ((3.0 + SQRT_2) * 2.0);
        assert!((pdf_piece(1, SQRT_2) - want).abs() < 1e-15);
        assert!((want - 0.314_052_399_488_939_6).abs() < 1e-15);
        assert!((pdf(SQRT_2) - want).abs() < 1e-15);
    }

    #[test]
    fn piece_lookup() {
        assert_eq!(pdf_piece_id(0.99), 0);
        assert_eq!(pdf_piece_id(1.0), 1);
        for (i, b) in BREAKPOINTS.iter().enumerate() {
            assert_eq!(pdf_piece_id(*b), i as u8 + 1);
            assert!((breakpoints_exact()[i].to_f64().unwrap() - b).abs() < 1e-15);
        }
        assert_eq!(pdf_piece_id(1e9), 7);
        assert_eq!(piece_id_exact(&QSqrt2::from_ints(3, 2)), 7);
        assert_eq!(piece_id_exact(&QSqrt2::from_ints(3, 0)), 3);
        assert_eq!(piece_id_exact(&QSqrt2::from_ints(3, 1)), 5);
        let last = QSqrt2::from_ints(3, 2);
        assert_eq!(last, crate::numfield::unit().pow(2));
        assert_eq!(pieces().len(), 7);
        assert!(pieces()[6].hi.is_none());
    }

    #[test]
    fn continuity_at_breakpoints() {
        for (i, &b) in BREAKPOINTS.iter().enumerate().skip(1) {
            let left = pdf_piece(i as u8, b);
            let right = pdf_piece(i as u8 + 1, b);
            assert!((left - right).abs() < 1e-12, "piece {i}: {left} vs {right}");
        }
    }

    #[test]
    fn cdf_basics() {
        assert_eq!(cdf(1.0), 0.0);
        assert_eq!(cdf(0.2), 0.0);
        assert!((cdf(2.0) - 0.293_382_101_149_885_8).abs() < 1e-10);
        let many = cdf_many(&[3.0, 1.5, 2.0, 0.5, 2.0]);
        assert!((many[2] - cdf(2.0)).abs() < 1e-12);
        assert_eq!(many[2], many[4]);
        assert_eq!(many[3], 0.0);
        assert!((many[0] - cdf(3.0)).abs() < 1e-12);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for p in [0.01, 0.3, 0.5, 0.9, 0.999] {
            let t = quantile(p);
            assert!((cdf(t) - p).abs() < 1e-10, "{p}: {t}");
        }
        assert_eq!(quantile(0.0), 1.0);
    }

    #[test]
    fn exact_normalization_constant() {
        assert_eq!(measure_times_area_exact(), QSqrt2::one());
        let c = constants();
        assert!((c.measure_const * c.domain_area - 1.0).abs() < 1e-15);
        assert!((c.mean_return_time - 3.353_803_886_569_353_6).abs() < 1e-14);
    }

    #[test]
    fn rescaling() {
        for t in [1.2, 3.0, 7.5] {
            assert_eq!(rescale_pdf(1.0, t), pdf(t));
        }
        let c = constants().octagon_scale;
        let c2 = c * c;
        assert!((c2 - 1.0 / SQRT_2).abs() < 1e-15);
        assert_eq!(octagon_pdf(0.99 * c2), 0.0);
        assert!(octagon_pdf(1.01 * c2) > 0.0);
    }
}
