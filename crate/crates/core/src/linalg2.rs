//! 2×2 matrices and plane vectors over a [`Scalar`], and the named group elements.

use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numfield::QSqrt2;
use crate::scalar::Scalar;

/// Holonomy vector `(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vec2<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Vec2<S> {
    pub fn new(x: S, y: S) -> Self {
        Vec2 { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Vec2::new(S::from_i64(x), S::from_i64(y))
    }

    pub fn neg(&self) -> Self {
        Vec2::new(-self.x.clone(), -self.y.clone())
    }

    pub fn to_f64(&self) -> Result<Vec2<f64>> {
        Ok(Vec2::new(self.x.to_f64()?, self.y.to_f64()?))
    }
}

/// `[[a11, a12], [a21, a22]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2<S> {
    pub a11: S,
    pub a12: S,
    pub a21: S,
    pub a22: S,
}

impl<S: Scalar> Mat2<S> {
    pub fn new(a11: S, a12: S, a21: S, a22: S) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    pub fn from_ints(a11: i64, a12: i64, a21: i64, a22: i64) -> Self {
        Mat2::new(S::from_i64(a11), S::from_i64(a12), S::from_i64(a21), S::from_i64(a22))
    }

    pub fn identity() -> Self {
        Mat2::from_ints(1, 0, 0, 1)
    }

    pub fn det(&self) -> S {
        self.a11.clone() * self.a22.clone() - self.a12.clone() * self.a21.clone()
    }

    pub fn mul(&self, o: &Mat2<S>) -> Mat2<S> {
        let (a, b, c, d) = (&self.a11, &self.a12, &self.a21, &self.a22);
        Mat2::new(
            a.clone() * o.a11.clone() + b.clone() * o.a21.clone(),
            a.clone() * o.a12.clone() + b.clone() * o.a22.clone(),
            c.clone() * o.a11.clone() + d.clone() * o.a21.clone(),
            c.clone() * o.a12.clone() + d.clone() * o.a22.clone(),
        )
    }

    pub fn inv(&self) -> Result<Mat2<S>> {
        let det = self.det();
        if det.is_zero() {
            return Err(Error::SingularMatrix);
        }
        let r = det.recip()?;
        Ok(Mat2::new(
            self.a22.clone() * r.clone(),
            -self.a12.clone() * r.clone(),
            -self.a21.clone() * r.clone(),
            self.a11.clone() * r,
        ))
    }

    pub fn apply(&self, v: &Vec2<S>) -> Vec2<S> {
        Vec2::new(
            self.a11.clone() * v.x.clone() + self.a12.clone() * v.y.clone(),
            self.a21.clone() * v.x.clone() + self.a22.clone() * v.y.clone(),
        )
    }

    pub fn neg(&self) -> Mat2<S> {
        Mat2::new(-self.a11.clone(), -self.a12.clone(), -self.a21.clone(), -self.a22.clone())
    }

    /// Integer power; negative exponents use the inverse.
    pub fn pow(&self, n: i64) -> Result<Mat2<S>> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut acc = Mat2::identity();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat2::identity()
    }

    pub fn to_f64(&self) -> Result<Mat2<f64>> {
        Ok(Mat2::new(self.a11.to_f64()?, self.a12.to_f64()?, self.a21.to_f64()?, self.a22.to_f64()?))
    }
}

impl<S: Scalar> Serialize for Vec2<S> {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        [&self.x, &self.y].serialize(s)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Vec2<S> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [x, y] = <[S; 2]>::deserialize(d)?;
        Ok(Vec2 { x, y })
    }
}

impl<S: Scalar> Serialize for Mat2<S> {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        [&self.a11, &self.a12, &self.a21, &self.a22].serialize(s)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Mat2<S> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a11, a12, a21, a22] = <[S; 4]>::deserialize(d)?;
        Ok(Mat2 { a11, a12, a21, a22 })
    }
}

/// `y / x`.
pub fn slope<S: Scalar>(v: &Vec2<S>) -> Result<S> {
    if v.x.is_zero() {
        return Err(Error::VerticalVector);
    }
    v.y.try_div(&v.x)
}

/// `M_{a,b} = [[a, b], [0, 1/a]]`.
pub fn shear<S: Scalar>(a: &S, b: &S) -> Result<Mat2<S>> {
    if a.is_zero() {
        return Err(Error::DegenerateShear);
    }
    Ok(Mat2::new(a.clone(), b.clone(), S::zero(), a.recip()?))
}

/// `h_s = [[1, 0], [−s, 1]]`; translates slopes by `−s`.
pub fn horocycle<S: Scalar>(s: &S) -> Mat2<S> {
    Mat2::new(S::one(), S::zero(), -s.clone(), S::one())
}

/// `g_R = diag(1/R, R)`.
pub fn geodesic_diag<S: Scalar>(r: &S) -> Result<Mat2<S>> {
    Ok(Mat2::new(r.recip()?, S::zero(), S::zero(), r.clone()))
}

/// `a_r = diag(e^{r/2}, e^{−r/2})`.
pub fn geodesic(r: f64) -> Mat2<f64> {
    Mat2::new((r / 2.0).exp(), 0.0, 0.0, (-r / 2.0).exp())
}

/// The named matrices of the octagon and the normalized L.
#[derive(Clone, Debug, PartialEq)]
pub struct Constants<S> {
    /// Order-8 elliptic generator of the L Veech group.
    pub r: Mat2<S>,
    /// Parabolic generator `[[1, 2+√2], [0, 1]]`.
    pub s: Mat2<S>,
    /// Rotation by π/4, an octagon generator.
    pub rho: Mat2<S>,
    /// Octagon parabolic `[[1, 2(1+√2)], [0, 1]]`.
    pub sigma: Mat2<S>,
    /// Clockwise quarter turn `[[0, 1], [−1, 0]]`.
    pub rot90: Mat2<S>,
    pub r_rotated: Mat2<S>,
    pub s_rotated: Mat2<S>,
    pub minus_id: Mat2<S>,
    /// Affine map taking the octagon to the normalized L (det √2).
    pub t: Mat2<S>,
}

pub fn constants<S: Scalar>() -> Constants<S> {
    let i = |n| S::from_i64(n);
    let rt = S::sqrt2;
    let unit = || i(1) + rt();
    let alpha = || i(2) + rt();
    let half_rt = || rt() * S::from_ratio(1, 2);
    let c = Constants {
        r: Mat2::new(unit(), -alpha(), i(1), i(-1)),
        s: Mat2::new(i(1), alpha(), i(0), i(1)),
        rho: Mat2::new(half_rt(), -half_rt(), half_rt(), half_rt()),
        sigma: Mat2::new(i(1), i(2) * unit(), i(0), i(1)),
        rot90: Mat2::from_ints(0, 1, -1, 0),
        r_rotated: Mat2::new(unit(), i(-1), alpha(), i(-1)),
        s_rotated: Mat2::from_ints(1, 1, 0, 1),
        minus_id: Mat2::from_ints(-1, 0, 0, -1),
        t: Mat2::new(i(1), unit(), i(0), rt()),
    };
    if S::EXACT {
        for m in [&c.r, &c.s, &c.rho, &c.sigma, &c.rot90, &c.r_rotated, &c.s_rotated, &c.minus_id] {
            assert!(m.det() == S::one(), "named group element with det != 1");
        }
    }
    c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SurfaceName {
    L,
    LRotated,
    Octagon,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceData<S> {
    pub name: SurfaceName,
    /// One representative per orbit of saddle connections.
    pub base_vectors: Vec<Vec2<S>>,
    /// Saddle connections whose images decide the section regions.
    pub candidate_vectors: Vec<(&'static str, Vec2<S>)>,
    pub generators: Vec<Mat2<S>>,
}

pub fn surface_data<S: Scalar>(name: SurfaceName) -> Result<SurfaceData<S>> {
    let c = constants::<S>();
    let rt = S::sqrt2;
    let unit = || S::one() + rt();
    let base =
        vec![Vec2::from_ints(1, 0), Vec2::new(unit(), S::zero()), Vec2::from_ints(0, 1), Vec2::new(S::zero(), rt())];
    let candidates = vec![
        ("AH", Vec2::from_ints(0, 1)),
        ("BD", Vec2::from_ints(1, 1)),
        ("HF", Vec2::new(unit(), rt())),
        ("AE", Vec2::new(unit(), S::one())),
    ];
    let transport = |m: &Mat2<S>, vs: &[Vec2<S>]| vs.iter().map(|v| m.apply(v)).collect::<Vec<_>>();
    Ok(match name {
        SurfaceName::L => {
            SurfaceData { name, base_vectors: base, candidate_vectors: candidates, generators: vec![c.r, c.s] }
        }
        SurfaceName::LRotated => SurfaceData {
            name,
            base_vectors: transport(&c.rot90, &base),
            candidate_vectors: vec![("Omega2", Vec2::from_ints(1, 0))],
            generators: vec![c.r_rotated, c.s_rotated],
        },
        SurfaceName::Octagon => {
            let t_inv = c.t.inv()?;
            SurfaceData {
                name,
                base_vectors: transport(&t_inv, &base),
                candidate_vectors: candidates.into_iter().map(|(l, v)| (l, t_inv.apply(&v))).collect(),
                generators: vec![c.rho, c.sigma],
            }
        }
    })
}

/// Exact constants, the common case.
pub fn exact() -> Constants<QSqrt2> {
    constants()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::{rat, QSqrt2};

    type Q = QSqrt2;

    fn qi(p: i64, q: i64) -> Q {
        Q::from_ints(p, q)
    }

    #[test]
    fn determinants_and_rotation() {
        let c = exact();
        assert_eq!(c.r.det(), Q::one());
        assert_eq!(c.s.det(), Q::one());
        assert_eq!(c.rot90.mul(&c.rot90), c.minus_id);
        assert_eq!(c.t.det(), Q::sqrt2());
    }

    #[test]
    fn elliptic_order_eight() {
        let c = exact();
        assert_eq!(c.r.pow(4).unwrap(), c.minus_id);
        assert!(c.r.pow(8).unwrap().is_identity());
        assert_eq!(c.rho.pow(4).unwrap(), c.minus_id);
    }

    #[test]
    fn t_conjugates_octagon_parabolic() {
        let c = exact();
        let conj = c.t.mul(&c.sigma).mul(&c.t.inv().unwrap());
        assert_eq!(conj, c.s);
    }

    #[test]
    fn rotated_parabolic_from_generators() {
        let c = exact();
        let p = c.s.inv().unwrap().mul(&c.r).neg();
        assert_eq!(p, Mat2::from_ints(1, 0, -1, 1));
        let rot_inv = c.rot90.inv().unwrap();
        assert_eq!(c.rot90.mul(&p).mul(&rot_inv), c.s_rotated);
    }

    #[test]
    fn shear_cases() {
        assert!(shear(&Q::one(), &Q::zero()).unwrap().is_identity());
        let m = shear(&Q::from_rational(rat(1, 2)), &Q::from(3)).unwrap();
        assert_eq!(m, Mat2::new(Q::from_rational(rat(1, 2)), Q::from(3), Q::zero(), Q::from(2)));
        assert_eq!(m.apply(&Vec2::from_ints(0, 1)), Vec2::new(Q::from(3), Q::from(2)));
        assert_eq!(m.det(), Q::one());
        assert_eq!(shear(&Q::zero(), &Q::one()), Err(Error::DegenerateShear));
    }

    #[test]
    fn horocycle_translates_slope() {
        let v = Vec2::<Q>::from_ints(1, 2);
        let s = Q::from_rational(rat(1, 2));
        assert_eq!(slope(&horocycle(&s).apply(&v)).unwrap(), Q::from_rational(rat(3, 2)));
    }

    #[test]
    fn horocycle_on_shear_matches_section_branch() {
        let a = Q::from_rational(rat(9, 10));
        let b = Q::from_rational(rat(1, 2));
        let s = (a.clone() * b.clone()).recip().unwrap();
        let m = horocycle(&s).mul(&shear(&a, &b).unwrap());
        let expect = Mat2::new(a.clone(), b.clone(), -b.recip().unwrap(), Q::zero());
        assert_eq!(m, expect);
    }

    #[test]
    fn geodesic_forms() {
        let g = geodesic_diag(&qi(1, 1)).unwrap();
        assert_eq!(g, Mat2::new(qi(-1, 1), Q::zero(), Q::zero(), qi(1, 1)));
        let gf = geodesic(-2.0 * (1.0 + 2f64.sqrt()).ln());
        assert!((gf.a11 - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert_eq!(geodesic_diag(&Q::zero()), Err(Error::ZeroDivisor));
    }

    #[test]
    fn inverse_and_slope() {
        let c = exact();
        assert_eq!(c.s.inv().unwrap(), Mat2::new(Q::one(), qi(-2, -1), Q::zero(), Q::one()));
        let v = Vec2::new(qi(2, 2), Q::one());
        assert_eq!(slope(&v).unwrap(), Q::new(rat(-1, 2), rat(1, 2)));
        assert_eq!(slope(&Vec2::<Q>::from_ints(0, 1)), Err(Error::VerticalVector));
        assert_eq!(Mat2::<Q>::from_ints(1, 2, 2, 4).inv(), Err(Error::SingularMatrix));
    }

    #[test]
    fn surface_tables() {
        let l = surface_data::<Q>(SurfaceName::L).unwrap();
        assert_eq!(l.base_vectors.len(), 4);
        assert!(l.base_vectors.contains(&Vec2::new(qi(1, 1), Q::zero())));
        let labels: Vec<_> = l.candidate_vectors.iter().map(|(l, _)| *l).collect();
        assert_eq!(labels, ["AH", "BD", "HF", "AE"]);
        let lr = surface_data::<Q>(SurfaceName::LRotated).unwrap();
        assert!(lr.base_vectors.contains(&Vec2::from_ints(1, 0)));
        let oct = surface_data::<Q>(SurfaceName::Octagon).unwrap();
        assert_eq!(oct.base_vectors[0], Vec2::from_ints(1, 0));
        assert!(surface_data::<f64>(SurfaceName::Octagon).is_ok());
    }

    #[test]
    fn json_forms() {
        let c = exact();
        let js = serde_json::to_string(&c.s).unwrap();
        assert_eq!(js, r#"["1/1 + 0/1*sqrt2","2/1 + 1/1*sqrt2","0/1 + 0/1*sqrt2","1/1 + 0/1*sqrt2"]"#);
        assert_eq!(serde_json::from_str::<Mat2<Q>>(&js).unwrap(), c.s);
        let f = c.s.to_f64().unwrap();
        let jf = serde_json::to_string(&f).unwrap();
        assert!(jf.starts_with("[1.0,3.414"));
        let v: Vec2<f64> = serde_json::from_str("[1.5, -2]").unwrap();
        assert_eq!(v, Vec2::new(1.5, -2.0));
    }
}
