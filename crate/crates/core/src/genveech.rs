//! Multi-cusp section parametrization for a general Veech surface, with the octagon as reference data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg2::{constants, Mat2, Vec2};
use crate::scalar::Scalar;

/// One cusp: parabolic generator `p`, conjugator `c` with `c·p·c⁻¹ = [[e, α], [0, e]]` and `c·w = (1, 0)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct CuspSpec<S> {
    pub p: Mat2<S>,
    pub c: Mat2<S>,
    pub alpha: S,
    pub eigen_sign: i8,
    pub short_vector: Vec2<S>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SurfaceSpec<S> {
    pub has_minus_id: bool,
    pub cusps: Vec<CuspSpec<S>>,
}

/// `{(a, b) : a ∈ (0, 1] (or [−1, 0) when `negative_a`), lower(a) < b ≤ 1}` with
/// `lower(a) = lower_const + lower_slope·a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct DomainPiece<S> {
    pub negative_a: bool,
    pub lower_const: S,
    pub lower_slope: S,
}

impl<S: Scalar> DomainPiece<S> {
    pub fn lower(&self, a: &S) -> S {
        self.lower_const.clone() + self.lower_slope.clone() * a.clone()
    }

    pub fn contains(&self, a: &S, b: &S) -> bool {
        let a_ok = if self.negative_a {
            a.sign() < 0 && (a.clone() + S::one()).sign() >= 0
        } else {
            a.sign() > 0 && (S::one() - a.clone()).sign() >= 0
        };
        a_ok && (S::one() - b.clone()).sign() >= 0 && (b.clone() - self.lower(a)).sign() > 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct DomainSpec<S> {
    pub pieces: Vec<DomainPiece<S>>,
}

impl<S: Scalar> DomainSpec<S> {
    pub fn contains(&self, a: &S, b: &S) -> bool {
        self.pieces.iter().any(|p| p.contains(a, b))
    }
}

fn check_cusp<S: Scalar>(i: usize, cusp: &CuspSpec<S>, has_minus_id: bool, errs: &mut Vec<Error>) {
    if cusp.alpha.sign() <= 0 {
        errs.push(Error::NonpositiveWidth { cusp: i });
    }
    if cusp.eigen_sign != 1 && cusp.eigen_sign != -1 {
        errs.push(Error::InvalidArgument(format!("cusp {i}: eigen_sign must be +1 or -1")));
        return;
    }
    if has_minus_id && cusp.eigen_sign == -1 {
        errs.push(Error::EigenSignWithMinusId { cusp: i });
    }
    let Ok(c_inv) = cusp.c.inv() else {
        errs.push(Error::SingularMatrix);
        return;
    };
    let e = S::from_i64(cusp.eigen_sign as i64);
    let want = Mat2::new(e.clone(), cusp.alpha.clone(), S::zero(), e);
    if cusp.c.mul(&cusp.p).mul(&c_inv) != want {
        errs.push(Error::BadParabolic { cusp: i, sign: cusp.eigen_sign });
    }
    if cusp.c.apply(&cusp.short_vector) != Vec2::from_ints(1, 0) {
        errs.push(Error::ShortVectorNotNormalized { cusp: i });
    }
}

/// Checks every cusp identity exactly; all violations are reported.
pub fn validate<S: Scalar>(spec: &SurfaceSpec<S>) -> std::result::Result<(), Vec<Error>> {
    let mut errs = Vec::new();
    for (i, cusp) in spec.cusps.iter().enumerate() {
        check_cusp(i, cusp, spec.has_minus_id, &mut errs);
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

fn piece<S: Scalar>(negative_a: bool, slope: S) -> DomainPiece<S> {
    DomainPiece { negative_a, lower_const: S::one(), lower_slope: slope }
}

pub fn build_domains<S: Scalar>(spec: &SurfaceSpec<S>) -> std::result::Result<Vec<DomainSpec<S>>, Vec<Error>> {
    validate(spec)?;
    Ok(spec
        .cusps
        .iter()
        .map(|cusp| {
            let alpha = cusp.alpha.clone();
            let pieces = match (spec.has_minus_id, cusp.eigen_sign) {
                (true, _) => vec![piece(false, -alpha)],
                (false, 1) => vec![piece(false, -alpha.clone()), piece(true, alpha)],
                _ => vec![piece(false, -(S::from_i64(2) * alpha))],
            };
            DomainSpec { pieces }
        })
        .collect())
}

/// Shift `b` by multiples of `width` into `(1 − width, 1]`.
fn shift_into<S: Scalar>(b: S, width: &S) -> Result<S> {
    let n = (S::one() - b.clone()).try_div(width)?.floor_i64()?;
    Ok(b + width.clone() * S::from_i64(n))
}

/// Section coordinates `(a, b)` of `g` in the chart of cusp `cusp_index`.
pub fn canonicalize<S: Scalar>(g: &Mat2<S>, cusp_index: usize, spec: &SurfaceSpec<S>) -> Result<(S, S)> {
    let cusp = spec.cusps.get(cusp_index).ok_or(Error::NoSuchCusp(cusp_index))?;
    let h = g.mul(&cusp.c.inv()?);
    if !h.a21.is_zero() {
        return Err(Error::NotUpperTriangular);
    }
    let a = h.a11.clone();
    let len_ok = a.sign() != 0 && (S::one() - abs(&a)).sign() >= 0;
    if !len_ok || h.det() != S::one() {
        return Err(Error::NotInSection);
    }
    let b = h.a12.clone();
    let alpha = cusp.alpha.clone();
    let (a, b) = match (spec.has_minus_id, cusp.eigen_sign) {
        (true, _) => {
            let (a, b) = if a.sign() < 0 { (-a, -b) } else { (a, b) };
            let w = alpha * a.clone();
            let b = shift_into(b, &w)?;
            (a, b)
        }
        (false, 1) => {
            let w = alpha * abs(&a);
            let b = shift_into(b, &w)?;
            (a, b)
        }
        _ => {
            let (a, b) = if a.sign() < 0 { (-a.clone(), a * alpha.clone() - b) } else { (a, b) };
            let w = S::from_i64(2) * alpha * a.clone();
            let b = shift_into(b, &w)?;
            (a, b)
        }
    };
    Ok((a, b))
}

fn abs<S: Scalar>(x: &S) -> S {
    if x.sign() < 0 {
        -x.clone()
    } else {
        x.clone()
    }
}

/// Octagon (equivalently the normalized L): cusp 0 fixes the horizontal, cusp 1 the vertical.
pub fn octagon_spec<S: Scalar>() -> SurfaceSpec<S> {
    let k = constants::<S>();
    let s_inv = k.s.inv().expect("unipotent");
    SurfaceSpec {
        has_minus_id: true,
        cusps: vec![
            CuspSpec {
                p: k.s.clone(),
                c: Mat2::identity(),
                alpha: S::from_i64(2) + S::sqrt2(),
                eigen_sign: 1,
                short_vector: Vec2::from_ints(1, 0),
            },
            CuspSpec {
                p: s_inv.mul(&k.r).neg(),
                c: k.rot90.clone(),
                alpha: S::one(),
                eigen_sign: 1,
                short_vector: Vec2::from_ints(0, 1),
            },
        ],
    }
}
