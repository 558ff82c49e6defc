//! Poincaré section of the horocycle flow on the normalized L: regions, return time, return map.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg2::Mat2;
use crate::numfield::{unit, QSqrt2};
use crate::scalar::Scalar;

/// Which cusp chart a section point lives in: `One` is `M_{a,b}·L`, `Two` is `M_{a,b}·L^R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Component {
    One,
    Two,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Region {
    AH,
    BD,
    HF,
    AE,
    Omega2,
}

impl Region {
    pub const ALL: [Region; 5] = [Region::AH, Region::BD, Region::HF, Region::AE, Region::Omega2];

    pub fn name(self) -> &'static str {
        match self {
            Region::AH => "AH",
            Region::BD => "BD",
            Region::HF => "HF",
            Region::AE => "AE",
            Region::Omega2 => "Omega2",
        }
    }

    pub fn target(self) -> Component {
        match self {
            Region::AH => Component::Two,
            _ => Component::One,
        }
    }
}

impl Component {
    pub fn name(self) -> &'static str {
        match self {
            Component::One => "One",
            Component::Two => "Two",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SectionPoint<S> {
    pub component: Component,
    pub a: S,
    pub b: S,
}

impl<S: Scalar> SectionPoint<S> {
    pub fn new(component: Component, a: S, b: S) -> Self {
        SectionPoint { component, a, b }
    }

    pub fn to_f64(&self) -> Result<SectionPoint<f64>> {
        Ok(SectionPoint::new(self.component, self.a.to_f64()?, self.b.to_f64()?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct BranchStep<S> {
    pub region: Region,
    pub k: i64,
    pub return_time: S,
    pub image: SectionPoint<S>,
    /// Float backend only: a branch decision fell within rounding distance of a boundary.
    pub suspect: bool,
}

/// Linear form `ca·a + cb·b`.
#[derive(Clone, Debug)]
struct Form<S> {
    ca: S,
    cb: S,
}

impl<S: Scalar> Form<S> {
    fn eval(&self, a: &S, b: &S) -> S {
        self.ca.clone() * a.clone() + self.cb.clone() * b.clone()
    }

    fn scaled(&self, k: &S) -> Form<S> {
        Form { ca: self.ca.clone() * k.clone(), cb: self.cb.clone() * k.clone() }
    }
}

/// Every branch has the shape `(a, b) ↦ (new_a, base + k·width)` with
/// `k = ⌊(1 − base)/width⌋`.
#[derive(Clone, Debug)]
struct Branch<S> {
    new_a: Form<S>,
    base: Form<S>,
    width: Form<S>,
    /// Saddle connection whose image is the shortest positive-slope vector; `None` for Ω₂.
    candidate: Option<(S, S)>,
}

/// Coefficient tables for the five branches, built once per backend.
#[derive(Clone, Debug)]
pub struct Section<S> {
    alpha: S,
    branches: [Branch<S>; 5],
}

fn idx(r: Region) -> usize {
    match r {
        Region::AH => 0,
        Region::BD => 1,
        Region::HF => 2,
        Region::AE => 3,
        Region::Omega2 => 4,
    }
}

const PRIORITY: [Region; 4] = [Region::AE, Region::HF, Region::BD, Region::AH];
const FLOAT_MARGIN: f64 = 1e-12;

impl<S: Scalar> Default for Section<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> Section<S> {
    pub fn new() -> Self {
        let i = |n| S::from_i64(n);
        let rt = S::sqrt2;
        let u = || i(1) + rt();
        let alpha = i(2) + rt();
        let f = |ca: S, cb: S| Form { ca, cb };
        let ah =
            Branch { new_a: f(i(0), i(1)), base: f(i(-1), i(0)), width: f(i(0), i(1)), candidate: Some((i(0), i(1))) };
        let omega2 =
            Branch { new_a: f(i(0), i(1)), base: f(i(-1), i(0)), width: f(i(0), alpha.clone()), candidate: None };
        let bd = Branch {
            new_a: f(i(1), i(1)),
            base: f(i(0), i(1)),
            width: f(i(1), i(1)).scaled(&alpha),
            candidate: Some((i(1), i(1))),
        };
        let hf = Branch {
            new_a: f(u(), rt()),
            base: f(alpha.clone(), u()),
            width: f(u(), rt()).scaled(&alpha),
            candidate: Some((u(), rt())),
        };
        let ae = Branch {
            new_a: f(u(), i(1)),
            base: f(i(2) * u(), u()),
            width: f(u(), i(1)).scaled(&alpha),
            candidate: Some((u(), i(1))),
        };
        Section { alpha, branches: [ah, bd, hf, ae, omega2] }
    }

    /// Width of the component's cusp: `2+√2` for `One`, `1` for `Two`.
    pub fn width(&self, c: Component) -> S {
        match c {
            Component::One => self.alpha.clone(),
            Component::Two => S::one(),
        }
    }

    /// Lower bound `1 − w·a` of the component's chart.
    pub fn lower_bound(&self, c: Component, a: &S) -> S {
        S::one() - self.width(c) * a.clone()
    }

    pub fn in_domain(&self, c: Component, a: &S, b: &S) -> bool {
        a.sign() > 0
            && (S::one() - a.clone()).sign() >= 0
            && (S::one() - b.clone()).sign() >= 0
            && (b.clone() - self.lower_bound(c, a)).sign() > 0
    }

    pub fn contains(&self, p: &SectionPoint<S>) -> bool {
        self.in_domain(p.component, &p.a, &p.b)
    }

    fn check(&self, p: &SectionPoint<S>) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutsideSection(format!("({}, {}, {})", p.component.name(), p.a.to_text(), p.b.to_text())))
        }
    }

    /// `h = a·x + b·y`: the horizontal component of the candidate's image under `M_{a,b}`.
    fn candidate_h(&self, r: Region, a: &S, b: &S) -> S {
        let (x, y) = self.branches[idx(r)].candidate.as_ref().expect("candidate region");
        a.clone() * x.clone() + b.clone() * y.clone()
    }

    fn classify_inner(&self, p: &SectionPoint<S>) -> Result<(Region, bool)> {
        if p.component == Component::Two {
            return Ok((Region::Omega2, false));
        }
        let mut suspect = false;
        for r in PRIORITY {
            let h = self.candidate_h(r, &p.a, &p.b);
            if !S::EXACT {
                let hf = h.to_f64()?;
                if hf.abs() < FLOAT_MARGIN || (hf - 1.0).abs() < FLOAT_MARGIN {
                    suspect = true;
                }
            }
            if h.sign() > 0 && (S::one() - h).sign() >= 0 {
                return Ok((r, suspect));
            }
        }
        Err(Error::CoverageViolated { a: p.a.to_text(), b: p.b.to_text() })
    }

    /// Region by validity (`0 < h ≤ 1`) and priority `AE > HF > BD > AH`.
    pub fn classify(&self, p: &SectionPoint<S>) -> Result<Region> {
        self.check(p)?;
        Ok(self.classify_inner(p)?.0)
    }

    /// Region from the explicit boundary lines; must agree with [`Section::classify`].
    pub fn classify_closed_form(&self, p: &SectionPoint<S>) -> Result<Region> {
        self.check(p)?;
        if p.component == Component::Two {
            return Ok(Region::Omega2);
        }
        let (a, b) = (&p.a, &p.b);
        let u = S::one() + S::sqrt2();
        let ae_line = S::one() - u * a.clone();
        if (ae_line.clone() - b.clone()).sign() >= 0 {
            return Ok(Region::AE);
        }
        let hf_line = ae_line.try_div(&S::sqrt2())?;
        if (hf_line - b.clone()).sign() >= 0 {
            return Ok(Region::HF);
        }
        if (S::one() - a.clone() - b.clone()).sign() >= 0 {
            return Ok(Region::BD);
        }
        Ok(Region::AH)
    }

    fn time_in(&self, r: Region, a: &S, b: &S) -> Result<S> {
        match r {
            Region::Omega2 => (a.clone() * b.clone()).recip(),
            _ => {
                let (_, y) = self.branches[idx(r)].candidate.as_ref().expect("candidate region");
                let h = self.candidate_h(r, a, b);
                y.try_div(&(a.clone() * h))
            }
        }
    }

    /// Slope of the candidate's image under `M_{a,b}`, i.e. the return time.
    pub fn return_time(&self, p: &SectionPoint<S>) -> Result<S> {
        let r = self.classify(p)?;
        self.time_in(r, &p.a, &p.b)
    }

    /// All valid candidates with their slopes `y/(a·h)`.
    pub fn valid_candidates(&self, p: &SectionPoint<S>) -> Result<Vec<(Region, S)>> {
        self.check(p)?;
        if p.component == Component::Two {
            return Ok(vec![(Region::Omega2, self.time_in(Region::Omega2, &p.a, &p.b)?)]);
        }
        let mut out = Vec::new();
        for r in PRIORITY {
            let h = self.candidate_h(r, &p.a, &p.b);
            if h.sign() > 0 && (S::one() - h).sign() >= 0 {
                out.push((r, self.time_in(r, &p.a, &p.b)?));
            }
        }
        Ok(out)
    }

    pub fn step(&self, p: &SectionPoint<S>) -> Result<BranchStep<S>> {
        self.check(p)?;
        let (region, mut suspect) = self.classify_inner(p)?;
        let br = &self.branches[idx(region)];
        let (a, b) = (&p.a, &p.b);
        let new_a = br.new_a.eval(a, b);
        let base = br.base.eval(a, b);
        let width = br.width.eval(a, b);
        if width.is_zero() {
            return Err(Error::RangeViolated(format!("zero width in {}", region.name())));
        }
        let arg = (S::one() - base.clone()).try_div(&width)?;
        let mut k = arg.floor_i64()?;
        if !S::EXACT {
            let x = arg.to_f64()?;
            let frac = x - x.floor();
            let tol = FLOAT_MARGIN * x.abs().max(1.0);
            if frac < tol || 1.0 - frac < tol {
                suspect = true;
            }
        }
        let target = region.target();
        let image_b = |k: i64| base.clone() + width.clone() * S::from_i64(k);
        let mut image = SectionPoint::new(target, new_a.clone(), image_b(k));
        if !self.contains(&image) {
            if S::EXACT {
                return Err(Error::RangeViolated(format!(
                    "{} image ({}, {})",
                    region.name(),
                    image.a.to_text(),
                    image.b.to_text()
                )));
            }
            let retry = [k - 1, k + 1]
                .into_iter()
                .map(|kk| (kk, SectionPoint::new(target, new_a.clone(), image_b(kk))))
                .find(|(_, q)| self.contains(q));
            match retry {
                Some((kk, q)) => {
                    k = kk;
                    image = q;
                    suspect = true;
                }
                None => {
                    return Err(Error::RangeViolated(format!(
                        "{} image ({}, {})",
                        region.name(),
                        image.a.to_text(),
                        image.b.to_text()
                    )))
                }
            }
        }
        let return_time = self.time_in(region, a, b)?;
        Ok(BranchStep { region, k, return_time, image, suspect })
    }

    pub fn trajectory(&self, p: &SectionPoint<S>, n: usize) -> Result<Vec<BranchStep<S>>> {
        self.orbit(p.clone()).take(n).collect()
    }

    /// Lazy orbit; stops after the first error.
    pub fn orbit(&self, start: SectionPoint<S>) -> Orbit<'_, S> {
        Orbit { section: self, current: Some(start) }
    }

    /// Linear part of the branch as a map on column vectors `(a, b)`.
    pub fn branch_matrix(&self, region: Region, k: i64) -> Mat2<S> {
        let br = &self.branches[idx(region)];
        let kk = S::from_i64(k);
        Mat2::new(
            br.new_a.ca.clone(),
            br.new_a.cb.clone(),
            br.base.ca.clone() + kk.clone() * br.width.ca.clone(),
            br.base.cb.clone() + kk * br.width.cb.clone(),
        )
    }

    /// The section point of `g_R·L`: `(One, 1/R, (2+√2)·k*/R)` with `k* = ⌊R/(2+√2)⌋`.
    pub fn point_for_radius(&self, r: &S) -> Result<SectionPoint<S>> {
        if (r.clone() - S::one()).sign() < 0 {
            return Err(Error::RadiusBelowOne);
        }
        let a = r.recip()?;
        let k = r.try_div(&self.alpha)?.floor_i64()?;
        let b = self.alpha.clone() * S::from_i64(k) * a.clone();
        let p = SectionPoint::new(Component::One, a, b);
        debug_assert!(self.contains(&p));
        Ok(p)
    }
}

pub struct Orbit<'a, S> {
    section: &'a Section<S>,
    current: Option<SectionPoint<S>>,
}

impl<S: Scalar> Iterator for Orbit<'_, S> {
    type Item = Result<BranchStep<S>>;

    fn next(&mut self) -> Option<Self::Item> {
        let p = self.current.take()?;
        match self.section.step(&p) {
            Ok(s) => {
                self.current = Some(s.image.clone());
                Some(Ok(s))
            }
            Err(e) => Some(Err(e)),
        }
    }
}

pub fn in_domain<S: Scalar>(c: Component, a: &S, b: &S) -> bool {
    Section::new().in_domain(c, a, b)
}

pub fn classify<S: Scalar>(p: &SectionPoint<S>) -> Result<Region> {
    Section::new().classify(p)
}

pub fn return_time<S: Scalar>(p: &SectionPoint<S>) -> Result<S> {
    Section::new().return_time(p)
}

pub fn step<S: Scalar>(p: &SectionPoint<S>) -> Result<BranchStep<S>> {
    Section::new().step(p)
}

pub fn trajectory<S: Scalar>(p: &SectionPoint<S>, n: usize) -> Result<Vec<BranchStep<S>>> {
    Section::new().trajectory(p, n)
}

pub fn branch_matrix<S: Scalar>(region: Region, k: i64) -> Mat2<S> {
    Section::new().branch_matrix(region, k)
}

pub fn section_point_for_radius<S: Scalar>(r: &S) -> Result<SectionPoint<S>> {
    Section::new().point_for_radius(r)
}

/// `(1+√2)^k`.
pub fn radius_power(k: u32) -> QSqrt2 {
    unit().pow(k)
}

/// CSV with one row per step, showing the point the step was applied to.
pub fn trajectory_csv<S: Scalar>(start: &SectionPoint<S>, steps: &[BranchStep<S>]) -> String {
    let mut out = String::from("step,component,region,k,a,b,return_time\n");
    let mut p = start;
    for (i, s) in steps.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            i,
            p.component.name(),
            s.region.name(),
            s.k,
            csv_field(&p.a.to_text()),
            csv_field(&p.b.to_text()),
            csv_field(&s.return_time.to_text())
        );
        p = &s.image;
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::{alpha, rat};

    type Q = QSqrt2;

    fn r(n: i64, d: i64) -> Q {
        Q::from_rational(rat(n, d))
    }

    fn pt(c: Component, a: Q, b: Q) -> SectionPoint<Q> {
        SectionPoint::new(c, a, b)
    }

    #[test]
    fn domain_membership() {
        let s = Section::<Q>::new();
        assert!(s.in_domain(Component::One, &Q::one(), &Q::one()));
        let lower = Q::one() - alpha() * r(1, 2);
        assert!(!s.in_domain(Component::One, &r(1, 2), &lower));
        assert!(!s.in_domain(Component::Two, &r(9, 10), &r(1, 20)));
        assert!(!s.in_domain(Component::One, &Q::zero(), &Q::one()));
        assert!(!s.in_domain(Component::One, &r(11, 10), &Q::one()));
    }

    #[test]
    fn classification_examples() {
        let s = Section::<Q>::new();
        let cases = [(r(1, 2), Region::AH), (r(-1, 2), Region::BD), (r(-1, 1), Region::HF), (r(-3, 2), Region::AE)];
        for (b, want) in cases {
            let p = pt(Component::One, r(9, 10), b);
            assert_eq!(s.classify(&p).unwrap(), want);
            assert_eq!(s.classify_closed_form(&p).unwrap(), want);
        }
        assert_eq!(s.classify(&pt(Component::Two, Q::one(), Q::one())).unwrap(), Region::Omega2);
        assert!(s.classify(&pt(Component::Two, r(9, 10), r(1, 20))).is_err());
    }

    #[test]
    fn return_time_examples() {
        let s = Section::<Q>::new();
        assert_eq!(s.return_time(&pt(Component::One, Q::one(), Q::one())).unwrap(), Q::one());
        assert_eq!(s.return_time(&pt(Component::One, r(9, 10), r(-1, 2))).unwrap(), r(25, 9));
        assert_eq!(s.return_time(&pt(Component::Two, Q::one(), Q::one())).unwrap(), Q::one());
    }

    #[test]
    fn step_examples() {
        let s = Section::<Q>::new();
        let st = s.step(&pt(Component::One, Q::one(), Q::one())).unwrap();
        assert_eq!((st.region, st.k), (Region::AH, 2));
        assert_eq!(st.image, pt(Component::Two, Q::one(), Q::one()));
        let st = s.step(&pt(Component::Two, Q::one(), Q::one())).unwrap();
        assert_eq!((st.region, st.k), (Region::Omega2, 0));
        assert_eq!(st.image, pt(Component::One, Q::one(), r(-1, 1)));
        let st = s.step(&pt(Component::One, r(9, 10), r(-1, 2))).unwrap();
        assert_eq!((st.region, st.k), (Region::BD, 1));
        assert_eq!(st.image, pt(Component::One, r(2, 5), r(-1, 2) + alpha() * r(2, 5)));
        assert!(!st.suspect);
    }

    #[test]
    fn trajectory_examples() {
        let s = Section::<Q>::new();
        let p = pt(Component::One, Q::one(), Q::one());
        let t = s.trajectory(&p, 2).unwrap();
        assert_eq!(t[0].image, pt(Component::Two, Q::one(), Q::one()));
        assert_eq!(t[1].region, Region::Omega2);
        assert_eq!(t[1].image, pt(Component::One, Q::one(), r(-1, 1)));
        let total = t.iter().fold(Q::zero(), |acc, s| acc + &s.return_time);
        assert_eq!(total, Q::from(2));
        assert_eq!(s.trajectory(&p, 1).unwrap(), vec![s.step(&p).unwrap()]);
    }

    #[test]
    fn branch_matrix_determinants() {
        let s = Section::<Q>::new();
        let bd = s.branch_matrix(Region::BD, 1);
        assert_eq!(bd, Mat2::new(Q::one(), Q::one(), alpha(), Q::from_ints(3, 1)));
        assert_eq!(bd.det(), Q::one());
        assert_eq!(s.branch_matrix(Region::AH, 2), Mat2::from_ints(0, 1, -1, 2));
        let hf = s.branch_matrix(Region::HF, 0);
        assert_eq!(hf, Mat2::new(unit(), Q::sqrt2(), alpha(), unit()));
        for reg in Region::ALL {
            for k in -3..5 {
                assert_eq!(s.branch_matrix(reg, k).det(), Q::one(), "{reg:?} {k}");
            }
        }
    }

    #[test]
    fn branch_matrix_reproduces_step() {
        let s = Section::<Q>::new();
        let p = pt(Component::One, r(9, 10), r(-3, 2));
        let st = s.step(&p).unwrap();
        let m = s.branch_matrix(st.region, st.k);
        let v = m.apply(&crate::linalg2::Vec2::new(p.a.clone(), p.b.clone()));
        assert_eq!((v.x, v.y), (st.image.a, st.image.b));
    }

    #[test]
    fn radius_points() {
        let s = Section::<Q>::new();
        assert_eq!(s.point_for_radius(&Q::one()).unwrap(), pt(Component::One, Q::one(), Q::zero()));
        let p = s.point_for_radius(&unit()).unwrap();
        assert_eq!(p, pt(Component::One, Q::from_ints(-1, 1), Q::zero()));
        let r3 = radius_power(3);
        assert_eq!(r3, Q::from_ints(7, 5));
        let p = s.point_for_radius(&r3).unwrap();
        assert_eq!(p.a, Q::from_ints(-7, 5));
        assert!(s.contains(&p));
        assert_eq!(s.point_for_radius(&r(1, 2)), Err(Error::RadiusBelowOne));
    }

    #[test]
    fn float_backend_matches_examples() {
        let s = Section::<f64>::new();
        let st = s.step(&SectionPoint::new(Component::One, 0.9, -0.5)).unwrap();
        assert_eq!((st.region, st.k), (Region::BD, 1));
        assert!((st.image.b - 0.865_685_424_949_238).abs() < 1e-12);
        assert!((st.return_time - 25.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn csv_dump() {
        let s = Section::<Q>::new();
        let p = pt(Component::One, Q::one(), Q::one());
        let csv = trajectory_csv(&p, &s.trajectory(&p, 2).unwrap());
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "step,component,region,k,a,b,return_time");
        assert_eq!(lines[1], "0,One,AH,2,1/1 + 0/1*sqrt2,1/1 + 0/1*sqrt2,1/1 + 0/1*sqrt2");
        assert!(lines[2].starts_with("1,Two,Omega2,0,"));
        let sf = Section::<f64>::new();
        let pf = SectionPoint::new(Component::One, 0.9, -0.5);
        let csv = trajectory_csv(&pf, &sf.trajectory(&pf, 1).unwrap());
        assert_eq!(csv.lines().nth(1).unwrap(), "0,One,BD,1,0.90000000000000002,-0.5,2.7777777777777772");
    }
}
