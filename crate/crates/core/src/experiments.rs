//! Gap samples from section iteration, the word-ball slope oracle, and comparison statistics.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg2::{constants, Mat2, Vec2};
use crate::numfield::QSqrt2;
use crate::scalar::{fmt_g17, Scalar};
use crate::section::{radius_power, Component, Section, SectionPoint};

/// All products of at most `w` generators from `{R, R⁻¹, S, S⁻¹}`, deduplicated exactly.
pub fn word_ball(w: usize) -> Vec<Mat2<QSqrt2>> {
    let c = constants::<QSqrt2>();
    let gens = [c.r.clone(), c.r.inv().expect("det 1"), c.s.clone(), c.s.inv().expect("det 1")];
    let mut seen: HashSet<Mat2<QSqrt2>> = HashSet::new();
    let mut all = vec![Mat2::identity()];
    seen.insert(Mat2::identity());
    let mut frontier = all.clone();
    for _ in 0..w {
        let products: Vec<Mat2<QSqrt2>> =
            frontier.par_iter().flat_map_iter(|g| gens.iter().map(move |s| s.mul(g))).collect();
        let mut next = Vec::new();
        for m in products {
            if seen.insert(m.clone()) {
                next.push(m);
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    all
}

fn cmp_vec(a: &Vec2<QSqrt2>, b: &Vec2<QSqrt2>) -> Ordering {
    a.x.cmp(&b.x).then_with(|| a.y.cmp(&b.y))
}

/// Orbit vectors `g·v` for `g` in the word ball and `v` a base vector, inside `[0, bound]²`.
/// Not complete for the box: long words can land anywhere.
pub fn word_ball_vectors(w: usize, bound: &QSqrt2) -> Vec<Vec2<QSqrt2>> {
    let base = crate::linalg2::surface_data::<QSqrt2>(crate::linalg2::SurfaceName::L).expect("exact data").base_vectors;
    let zero = QSqrt2::zero();
    let inside = |v: &Vec2<QSqrt2>| v.x >= zero && v.y >= zero && &v.x <= bound && &v.y <= bound;
    let found: HashSet<Vec2<QSqrt2>> =
        word_ball(w).par_iter().flat_map_iter(|g| base.iter().map(move |v| g.apply(v))).filter(inside).collect();
    let mut out: Vec<_> = found.into_iter().collect();
    out.sort_by(cmp_vec);
    out
}

/// Slopes `y/x` of word-ball vectors with `x ∈ (0, 1]` and `0 < y/x ≤ slope_max`, increasing.
pub fn strip_slopes_oracle(w: usize, slope_max: &QSqrt2) -> Vec<QSqrt2> {
    let bound = if *slope_max > QSqrt2::one() { slope_max.clone() } else { QSqrt2::one() };
    let zero = QSqrt2::zero();
    let one = QSqrt2::one();
    let mut slopes: Vec<QSqrt2> = word_ball_vectors(w, &bound)
        .into_iter()
        .filter(|v| v.x > zero && v.x <= one && v.y > zero)
        .map(|v| v.y.checked_div(&v.x).expect("x > 0"))
        .filter(|s| s <= slope_max)
        .collect();
    slopes.sort();
    slopes.dedup();
    slopes
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapSource {
    SectionIteration,
    WordBall,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct GapSample<S> {
    pub source: GapSource,
    pub radius: Option<S>,
    pub start: Option<SectionPoint<S>>,
    /// Starts at the slope of the section hit, so `slopes.len() == gaps.len() + 1`.
    pub slopes: Vec<S>,
    pub gaps: Vec<S>,
    /// `R²` for section samples started from a radius.
    pub renormalization: Option<S>,
    /// Float backend: steps whose branch decision sat within rounding distance of a boundary.
    pub suspect_steps: usize,
}

impl<S: Scalar> GapSample<S> {
    pub fn validate(&self) -> Result<()> {
        if self.slopes.len() != self.gaps.len() + 1 {
            return Err(Error::InvalidArgument("slope and gap counts disagree".into()));
        }
        if let Some(i) = self.gaps.iter().position(|g| g.sign() <= 0) {
            return Err(Error::InvalidArgument(format!("gap {i} is not positive")));
        }
        if let Some(i) = self.slopes.windows(2).position(|w| (w[1].clone() - w[0].clone()).sign() <= 0) {
            return Err(Error::InvalidArgument(format!("slopes not increasing at {i}")));
        }
        Ok(())
    }

    pub fn gaps_f64(&self) -> Result<Vec<f64>> {
        self.gaps.iter().map(|g| g.to_f64()).collect()
    }

    /// Rows `index, slope, gap`: the slope reached after each gap.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,slope,gap\n");
        for (i, g) in self.gaps.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", i, self.slopes[i + 1].to_text(), g.to_text());
        }
        out
    }
}

/// Gaps along the orbit of `start`: the return times, with slopes as their prefix sums from 0.
pub fn gaps_from_point<S: Scalar>(start: &SectionPoint<S>, n: usize) -> Result<GapSample<S>> {
    let sec = Section::<S>::new();
    let mut slopes = Vec::with_capacity(n + 1);
    let mut gaps = Vec::with_capacity(n);
    let mut acc = S::zero();
    slopes.push(acc.clone());
    let mut suspect_steps = 0;
    for st in sec.orbit(start.clone()).take(n) {
        let st = st?;
        suspect_steps += st.suspect as usize;
        acc = acc + st.return_time.clone();
        slopes.push(acc.clone());
        gaps.push(st.return_time);
    }
    Ok(GapSample {
        source: GapSource::SectionIteration,
        radius: None,
        start: Some(start.clone()),
        slopes,
        gaps,
        renormalization: None,
        suspect_steps,
    })
}

/// Renormalized gaps of the L surface at radius `r`, read off the section orbit of `g_R·L`.
pub fn gaps_via_section<S: Scalar>(r: &S, n: usize) -> Result<GapSample<S>> {
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two steps".into()));
    }
    let start = Section::<S>::new().point_for_radius(r)?;
    let mut sample = gaps_from_point(&start, n)?;
    sample.radius = Some(r.clone());
    sample.renormalization = Some(r.clone() * r.clone());
    Ok(sample)
}

/// `(One, 1, √2 − 1)`, whose exact orbit is periodic.
pub fn criterion_start() -> SectionPoint<QSqrt2> {
    SectionPoint::new(Component::One, QSqrt2::one(), QSqrt2::sqrt2() - QSqrt2::one())
}

/// Exact section point for `R = (1+√2)^k`.
pub fn start_for_exponent(k: u32) -> Result<SectionPoint<QSqrt2>> {
    Section::<QSqrt2>::new().point_for_radius(&radius_power(k))
}

/// Float-mode sample from the exact start at `R = (1+√2)^k`.
pub fn float_gaps_for_exponent(k: u32, n: usize) -> Result<GapSample<f64>> {
    let r = radius_power(k);
    let start = start_for_exponent(k)?.to_f64()?;
    let mut sample = gaps_from_point(&start, n)?;
    let rf = r.to_f64()?;
    sample.radius = Some(rf);
    sample.renormalization = Some(rf * rf);
    Ok(sample)
}

/// Exact-mode sample at `R = (1+√2)^k`.
pub fn exact_gaps_for_exponent(k: u32, n: usize) -> Result<GapSample<QSqrt2>> {
    gaps_via_section(&radius_power(k), n)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KSReport {
    pub sample_size: usize,
    pub ks_distance: f64,
    pub pass_threshold: f64,
    pub passed: bool,
}

/// Kolmogorov–Smirnov sup distance between the empirical CDF of `sample` and a model CDF,
/// evaluated on both sides of every jump. `cdf` receives the distinct sample values in increasing order.
pub fn ks_distance<F>(sample: &[f64], cdf: F, pass_threshold: f64) -> KSReport
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    assert!(!sample.is_empty(), "empty sample");
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let mut distinct = Vec::new();
    let mut counts = Vec::new();
    for x in xs {
        if distinct.last() == Some(&x) {
            *counts.last_mut().expect("nonempty") += 1;
        } else {
            distinct.push(x);
            counts.push(1usize);
        }
    }
    let model = cdf(&distinct);
    let n = sample.len() as f64;
    let mut below = 0usize;
    let mut d = 0.0f64;
    for (f, c) in model.iter().zip(&counts) {
        let left = below as f64 / n;
        below += c;
        let right = below as f64 / n;
        d = d.max((f - left).abs()).max((right - f).abs());
    }
    KSReport { sample_size: sample.len(), ks_distance: d, pass_threshold, passed: d < pass_threshold }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub k: u32,
    pub radius: f64,
    pub count: usize,
    pub ratio: f64,
}

/// Returns counted from the start at `R = (1+√2)^k` until the renormalized slope passes `R²·window`,
/// for `k = 1..=k_max`.
pub fn growth_check(k_max: u32, window: f64) -> Result<Vec<GrowthRow>> {
    if k_max < 4 {
        return Err(Error::InvalidArgument("k_max must be at least 4".into()));
    }
    let sec = Section::<f64>::new();
    (1..=k_max)
        .map(|k| {
            let r = radius_power(k).to_f64()?;
            let limit = r * r * window;
            let start = start_for_exponent(k)?.to_f64()?;
            let mut acc = 0.0;
            let mut count = 0;
            for st in sec.orbit(start) {
                acc += st?.return_time;
                if acc > limit {
                    break;
                }
                count += 1;
            }
            Ok(GrowthRow { k, radius: r, count, ratio: count as f64 / (r * r) })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub density: f64,
}

/// Equal bins on `[lo, hi)` plus one bin over `[hi, max]` for the overflow; densities are
/// normalized by the full sample so that `Σ density·width = 1` whenever all values are `≥ lo`.
pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<HistBin> {
    assert!(bins > 0 && hi > lo, "bad histogram range");
    let n = values.len().max(1) as f64;
    let w = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    let mut overflow = 0;
    let mut max = hi;
    for &v in values {
        if v >= hi {
            overflow += 1;
            max = max.max(v);
        } else if v >= lo {
            let i = (((v - lo) / w) as usize).min(bins - 1);
            counts[i] += 1;
        }
    }
    let mut out: Vec<HistBin> = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let b_lo = lo + w * i as f64;
            let b_hi = if i + 1 == bins { hi } else { lo + w * (i + 1) as f64 };
            HistBin { lo: b_lo, hi: b_hi, count: c, density: c as f64 / (n * (b_hi - b_lo)) }
        })
        .collect();
    if overflow > 0 {
        let width = if max > hi { max - hi } else { w };
        out.push(HistBin { lo: hi, hi: hi + width, count: overflow, density: overflow as f64 / (n * width) });
    }
    out
}

pub fn histogram_csv(bins: &[HistBin]) -> String {
    let mut out = String::from("bin_lo,bin_hi,count,density\n");
    for b in bins {
        let _ = writeln!(out, "{},{},{},{}", fmt_g17(b.lo), fmt_g17(b.hi), b.count, fmt_g17(b.density));
    }
    out
}

/// Octagon gaps are the L gaps scaled by `c² = 1/√2`.
pub fn octagon_gaps(l_gaps: &[f64]) -> Vec<f64> {
    let c = crate::distribution::constants().octagon_scale;
    l_gaps.iter().map(|g| g * c * c).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub compared: usize,
    pub mismatches: usize,
    /// First index where the slope sequences differ, with both values as text.
    pub first_mismatch: Option<(usize, String, String)>,
    /// Every oracle slope up to the compared window also occurs in the section sequence.
    pub oracle_sound: bool,
    pub oracle_len: usize,
}

/// Compares the first `n` positive section slopes of L (start `R = 1`) with the word-ball oracle.
pub fn oracle_prefix(w: usize, n: usize) -> Result<OracleComparison> {
    let sample = exact_gaps_for_exponent(0, n)?;
    let section: Vec<QSqrt2> = sample.slopes[1..].to_vec();
    let max = section.last().cloned().unwrap_or_else(QSqrt2::one);
    let oracle = strip_slopes_oracle(w, &max);
    let in_section: HashSet<&QSqrt2> = section.iter().collect();
    let oracle_sound = oracle.iter().all(|s| in_section.contains(s));
    let mut mismatches = 0;
    let mut first = None;
    for i in 0..n {
        let a = section.get(i);
        let b = oracle.get(i);
        if a != b {
            mismatches += 1;
            if first.is_none() {
                let txt = |x: Option<&QSqrt2>| x.map_or("missing".to_string(), |v| v.to_string());
                first = Some((i, txt(a), txt(b)));
            }
        }
    }
    Ok(OracleComparison { compared: n, mismatches, first_mismatch: first, oracle_sound, oracle_len: oracle.len() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchAgreement {
    /// Leading steps on which the float orbit repeats the exact `(region, k)` sequence.
    pub agreed: usize,
    /// Whether the float step at the first disagreement carried the suspect flag; `None` if none occurred.
    pub divergence_flagged: Option<bool>,
}

pub fn branch_agreement(start: &SectionPoint<QSqrt2>, n: usize) -> Result<BranchAgreement> {
    let exact = Section::<QSqrt2>::new().trajectory(start, n)?;
    let float = Section::<f64>::new().trajectory(&start.to_f64()?, n)?;
    let agreed = exact.iter().zip(&float).take_while(|(e, f)| e.region == f.region && e.k == f.k).count();
    let divergence_flagged = (agreed < n).then(|| float[agreed].suspect);
    Ok(BranchAgreement { agreed, divergence_flagged })
}
