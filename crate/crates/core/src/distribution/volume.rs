//! Integrals of the return time over the five section regions.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use super::dilog;
use crate::quad::{integrate, QuadOptions};
use crate::section::{Component, Region, Section, SectionPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    ClosedForm,
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub error: f64,
}

const CLOSED_FORM_ERROR: f64 = 1e-14;
const INNER: QuadOptions = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-12, max_panels: 400 };
const OUTER: QuadOptions = QuadOptions { abs_tol: 1e-9, rel_tol: 1e-10, max_panels: 3000 };

fn li2(z: f64) -> f64 {
    dilog(z).expect("argument in the real branch")
}

fn closed_form(region: Region) -> f64 {
    let ln_rt2 = SQRT_2.ln();
    let ln_u = (SQRT_2 - 1.0).ln();
    match region {
        Region::AH | Region::AE | Region::Omega2 => PI * PI / 6.0,
        Region::BD => li2(1.0) - li2(SQRT_2 - 1.0) - ln_rt2 * ln_u + li2(2.0 - SQRT_2),
        Region::HF => li2(1.0 / SQRT_2) - li2(1.0 - 1.0 / SQRT_2) + ln_rt2 * ln_u,
    }
}

/// Lines `b = c0 + c1·a` along which the classification or the chart boundary can change.
fn cut_lines(sec: &Section<f64>, comp: Component) -> Vec<(f64, f64)> {
    let mut lines = vec![(1.0, 0.0), (1.0, -sec.width(comp))];
    if comp == Component::One {
        let u = 1.0 + SQRT_2;
        for (x, y) in [(0.0, 1.0), (1.0, 1.0), (u, SQRT_2), (u, 1.0)] {
            lines.push((1.0 / y, -x / y));
            lines.push((0.0, -x / y));
        }
    }
    lines
}

fn crossings(lines: &[(f64, f64)]) -> Vec<f64> {
    let mut out = Vec::new();
    for (i, &(c0, c1)) in lines.iter().enumerate() {
        for &(d0, d1) in &lines[i + 1..] {
            if c1 != d1 {
                let a = (d0 - c0) / (c1 - d1);
                if a > 0.0 && a < 1.0 {
                    out.push(a);
                }
            }
        }
    }
    out
}

/// `∫ R(a, b) db` over the part of the slice at fixed `a` classified as `region`.
fn slice(sec: &Section<f64>, region: Region, comp: Component, lines: &[(f64, f64)], a: f64) -> f64 {
    let lo = sec.lower_bound(comp, &a);
    let mut cuts: Vec<f64> = lines.iter().map(|(c0, c1)| c0 + c1 * a).filter(|&b| b > lo && b < 1.0).collect();
    cuts.push(lo);
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let mid = SectionPoint::new(comp, a, 0.5 * (w[0] + w[1]));
        if sec.classify(&mid).ok() != Some(region) {
            continue;
        }
        let r = integrate(
            |b| sec.return_time(&SectionPoint::new(comp, a, b)).expect("interior point"),
            w[0],
            w[1],
            &[],
            INNER,
        );
        total += r.value;
    }
    total
}

/// Volume `∫∫ R da db` of one region, by dilogarithm closed form or by quadrature over the
/// cells that the section's own classifier assigns to the region.
pub fn region_volume(region: Region, method: Method) -> VolumeEstimate {
    match method {
        Method::ClosedForm => VolumeEstimate { value: closed_form(region), error: CLOSED_FORM_ERROR },
        Method::Quadrature => {
            let sec = Section::<f64>::new();
            let comp = if region == Region::Omega2 { Component::Two } else { Component::One };
            let lines = cut_lines(&sec, comp);
            let breaks = crossings(&lines);
            let r = integrate(|a| slice(&sec, region, comp, &lines, a), 0.0, 1.0, &breaks, OUTER);
            VolumeEstimate { value: r.value, error: r.error + INNER.abs_tol }
        }
    }
}

pub fn covolume_total(method: Method) -> VolumeEstimate {
    Region::ALL.iter().fold(VolumeEstimate { value: 0.0, error: 0.0 }, |acc, &r| {
        let v = region_volume(r, method);
        VolumeEstimate { value: acc.value + v.value, error: acc.error + v.error }
    })
}

/// The AE integrand over `a ∈ [√2−1, 1]` only, the lower limit as printed in the source formula.
pub fn ae_printed_limit_volume() -> VolumeEstimate {
    let u = 1.0 + SQRT_2;
    let alpha = 2.0 + SQRT_2;
    let inner = |x: f64| integrate(|y| 1.0 / (x * (u * x + y)), 1.0 - alpha * x, 1.0 - u * x, &[], INNER).value;
    let r = integrate(inner, SQRT_2 - 1.0, 1.0, &[], OUTER);
    VolumeEstimate { value: r.value, error: r.error + INNER.abs_tol }
}
