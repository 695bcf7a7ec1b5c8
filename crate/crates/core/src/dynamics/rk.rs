//! Embedded Runge-Kutta steps with continuous extension.

use serde::{Deserialize, Serialize};

use super::model::Model;
use super::tableau::{dop853 as d8, dopri5 as d5};
use crate::potential::FieldError;
use crate::scalar::{c, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// 8(5,3) pair, 7th-order dense output.
    #[default]
    Dop853,
    /// 5(4) pair, 4th-order dense output.
    Dopri5,
}

impl Method {
    pub(crate) fn order(self) -> f64 {
        match self {
            Method::Dop853 => 8.0,
            Method::Dopri5 => 5.0,
        }
    }
}

/// Polynomial interpolant over one accepted step.
#[derive(Clone, Debug)]
pub struct DenseSegment<T, const N: usize> {
    pub t0: T,
    pub h: T,
    /// End of validity; equals `t0 + h` unless the step was cut at an event.
    pub t_end: T,
    method: Method,
    coef: [[T; N]; 8],
}

impl<T: Real, const N: usize> DenseSegment<T, N> {
    pub fn eval(&self, t: T) -> [T; N] {
        let s = (t - self.t0) / self.h;
        let s1 = T::one() - s;
        let k = &self.coef;
        let mut y = [T::zero(); N];
        match self.method {
            Method::Dop853 => {
                for i in 0..N {
                    let conpar = k[4][i] + s * (k[5][i] + s1 * (k[6][i] + s * k[7][i]));
                    y[i] = k[0][i] + s * (k[1][i] + s1 * (k[2][i] + s * (k[3][i] + s1 * conpar)));
                }
            }
            Method::Dopri5 => {
                for i in 0..N {
                    y[i] = k[0][i] + s * (k[1][i] + s1 * (k[2][i] + s * (k[3][i] + s1 * k[4][i])));
                }
            }
        }
        y
    }

    pub fn contains(&self, t: T) -> bool {
        t >= self.t0.min(self.t_end) && t <= self.t0.max(self.t_end)
    }

    /// Image under the time map `t ↦ a t + b` and a state map applied to each
    /// coefficient. The map must be affine; the flag marks the constant term,
    /// the only coefficient that carries the translation part.
    pub fn mapped(&self, a: T, b: T, f: impl Fn(&[T; N], bool) -> [T; N]) -> Self {
        let mut coef = self.coef;
        for (j, cj) in coef.iter_mut().enumerate() {
            *cj = f(cj, j == 0);
        }
        let t0 = a * self.t0 + b;
        let t_end = a * self.t_end + b;
        Self { t0, h: a * self.h, t_end, method: self.method, coef }
    }
}

#[inline]
fn lc<T: Real, const N: usize>(y: &[T; N], h: T, terms: &[(f64, &[T; N])]) -> [T; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = T::zero();
        for (a, k) in terms {
            acc += T::lit(*a) * k[i];
        }
        out[i] += h * acc;
    }
    out
}

#[inline]
fn comb<T: Real, const N: usize>(terms: &[(f64, &[T; N])]) -> [T; N] {
    lc(&[T::zero(); N], T::one(), terms)
}

pub(crate) struct Trial<T, const N: usize> {
    pub y1: [T; N],
    /// Scaled error, accept when ≤ 1.
    pub err: T,
    k: [[T; N]; 12],
}

pub(crate) struct Accepted<T, const N: usize> {
    pub k_last: [T; N],
    pub dense: DenseSegment<T, N>,
}

fn scale<T: Real>(atol: T, rtol: T, a: T, b: T) -> T {
    atol + rtol * a.abs().max(b.abs())
}

pub(crate) fn attempt<T: Real, const N: usize, M: Model<T, N>>(
    method: Method,
    model: &M,
    t: T,
    y: &[T; N],
    k1: &[T; N],
    h: T,
    atol: T,
    rtol: T,
) -> Result<Trial<T, N>, FieldError> {
    match method {
        Method::Dop853 => attempt853(model, t, y, k1, h, atol, rtol),
        Method::Dopri5 => attempt5(model, t, y, k1, h, atol, rtol),
    }
}

fn attempt853<T: Real, const N: usize, M: Model<T, N>>(
    model: &M,
    t: T,
    y: &[T; N],
    k1: &[T; N],
    h: T,
    atol: T,
    rtol: T,
) -> Result<Trial<T, N>, FieldError> {
    use d8::*;
    let f = |cc: f64, yy: [T; N]| model.rhs(t + T::lit(cc) * h, &yy);
    let k2 = f(C2, lc(y, h, &[(A21, k1)]))?;
    let k3 = f(C3, lc(y, h, &[(A31, k1), (A32, &k2)]))?;
    let k4 = f(C4, lc(y, h, &[(A41, k1), (A43, &k3)]))?;
    let k5 = f(C5, lc(y, h, &[(A51, k1), (A53, &k3), (A54, &k4)]))?;
    let k6 = f(C6, lc(y, h, &[(A61, k1), (A64, &k4), (A65, &k5)]))?;
    let k7 = f(C7, lc(y, h, &[(A71, k1), (A74, &k4), (A75, &k5), (A76, &k6)]))?;
    let k8 = f(C8, lc(y, h, &[(A81, k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)]))?;
    let k9 = f(C9, lc(y, h, &[(A91, k1), (A94, &k4), (A95, &k5), (A96, &k6), (A97, &k7), (A98, &k8)]))?;
    let k10 =
        f(C10, lc(y, h, &[(A101, k1), (A104, &k4), (A105, &k5), (A106, &k6), (A107, &k7), (A108, &k8), (A109, &k9)]))?;
    let k11 = f(
        C11,
        lc(
            y,
            h,
            &[(A111, k1), (A114, &k4), (A115, &k5), (A116, &k6), (A117, &k7), (A118, &k8), (A119, &k9), (A1110, &k10)],
        ),
    )?;
    let k12 = f(
        1.0,
        lc(
            y,
            h,
            &[
                (A121, k1),
                (A124, &k4),
                (A125, &k5),
                (A126, &k6),
                (A127, &k7),
                (A128, &k8),
                (A129, &k9),
                (A1210, &k10),
                (A1211, &k11),
            ],
        ),
    )?;
    let bsum = comb(&[(B1, k1), (B6, &k6), (B7, &k7), (B8, &k8), (B9, &k9), (B10, &k10), (B11, &k11), (B12, &k12)]);
    let mut y1 = *y;
    let mut err = T::zero();
    let mut err2 = T::zero();
    for i in 0..N {
        y1[i] += h * bsum[i];
        let sk = scale(atol, rtol, y[i], y1[i]);
        let e2 = bsum[i] - T::lit(BHH1) * k1[i] - T::lit(BHH2) * k9[i] - T::lit(BHH3) * k12[i];
        let e1 = T::lit(ER1) * k1[i]
            + T::lit(ER6) * k6[i]
            + T::lit(ER7) * k7[i]
            + T::lit(ER8) * k8[i]
            + T::lit(ER9) * k9[i]
            + T::lit(ER10) * k10[i]
            + T::lit(ER11) * k11[i]
            + T::lit(ER12) * k12[i];
        err += (e1 / sk) * (e1 / sk);
        err2 += (e2 / sk) * (e2 / sk);
    }
    let mut deno = err + c::<T>(0.01) * err2;
    if deno <= T::zero() {
        deno = T::one();
    }
    let n = T::from_usize(N).unwrap();
    let err = h.abs() * err * (T::one() / (n * deno)).sqrt();
    Ok(Trial { y1, err, k: [*k1, k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12] })
}

fn attempt5<T: Real, const N: usize, M: Model<T, N>>(
    model: &M,
    t: T,
    y: &[T; N],
    k1: &[T; N],
    h: T,
    atol: T,
    rtol: T,
) -> Result<Trial<T, N>, FieldError> {
    use d5::*;
    let f = |cc: f64, yy: [T; N]| model.rhs(t + T::lit(cc) * h, &yy);
    let k2 = f(C2, lc(y, h, &[(A21, k1)]))?;
    let k3 = f(C3, lc(y, h, &[(A31, k1), (A32, &k2)]))?;
    let k4 = f(C4, lc(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]))?;
    let k5 = f(C5, lc(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
    let k6 = f(1.0, lc(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
    let y1 = lc(y, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    let k7 = f(1.0, y1)?;
    let e = comb(&[(E1, k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)]);
    let mut err = T::zero();
    for i in 0..N {
        let sk = scale(atol, rtol, y[i], y1[i]);
        let q = h * e[i] / sk;
        err += q * q;
    }
    let err = (err / T::from_usize(N).unwrap()).sqrt();
    let z = [T::zero(); N];
    Ok(Trial { y1, err, k: [*k1, k2, k3, k4, k5, k6, k7, z, z, z, z, z] })
}

/// Builds the interpolant of an accepted trial. Costs one (5(4)) or four (8(5,3))
/// extra right-hand-side evaluations.
pub(crate) fn accept<T: Real, const N: usize, M: Model<T, N>>(
    method: Method,
    model: &M,
    t: T,
    y: &[T; N],
    h: T,
    trial: &Trial<T, N>,
) -> Result<Accepted<T, N>, FieldError> {
    let k = &trial.k;
    let y1 = &trial.y1;
    let mut coef = [[T::zero(); N]; 8];
    let mut ydiff = [T::zero(); N];
    for i in 0..N {
        ydiff[i] = y1[i] - y[i];
    }
    coef[0] = *y;
    coef[1] = ydiff;
    let k_last = match method {
        Method::Dopri5 => {
            use d5::*;
            let k7 = k[6];
            for i in 0..N {
                let bspl = h * k[0][i] - ydiff[i];
                coef[2][i] = bspl;
                coef[3][i] = ydiff[i] - h * k7[i] - bspl;
            }
            let d = comb(&[(D1, &k[0]), (D3, &k[2]), (D4, &k[3]), (D5, &k[4]), (D6, &k[5]), (D7, &k7)]);
            for i in 0..N {
                coef[4][i] = h * d[i];
            }
            k7
        }
        Method::Dop853 => {
            use d8::*;
            let k13 = model.rhs(t + h, y1)?;
            for i in 0..N {
                let bspl = h * k[0][i] - ydiff[i];
                coef[2][i] = bspl;
                coef[3][i] = ydiff[i] - h * k13[i] - bspl;
            }
            let f = |cc: f64, yy: [T; N]| model.rhs(t + T::lit(cc) * h, &yy);
            let k14 = f(
                C14,
                lc(
                    y,
                    h,
                    &[
                        (A141, &k[0]),
                        (A147, &k[6]),
                        (A148, &k[7]),
                        (A149, &k[8]),
                        (A1410, &k[9]),
                        (A1411, &k[10]),
                        (A1412, &k[11]),
                        (A1413, &k13),
                    ],
                ),
            )?;
            let k15 = f(
                C15,
                lc(
                    y,
                    h,
                    &[
                        (A151, &k[0]),
                        (A156, &k[5]),
                        (A157, &k[6]),
                        (A158, &k[7]),
                        (A1511, &k[10]),
                        (A1512, &k[11]),
                        (A1513, &k13),
                        (A1514, &k14),
                    ],
                ),
            )?;
            let k16 = f(
                C16,
                lc(
                    y,
                    h,
                    &[
                        (A161, &k[0]),
                        (A166, &k[5]),
                        (A167, &k[6]),
                        (A168, &k[7]),
                        (A169, &k[8]),
                        (A1613, &k13),
                        (A1614, &k14),
                        (A1615, &k15),
                    ],
                ),
            )?;
            let rows: [[f64; 12]; 4] = [
                [D41, D46, D47, D48, D49, D410, D411, D412, D413, D414, D415, D416],
                [D51, D56, D57, D58, D59, D510, D511, D512, D513, D514, D515, D516],
                [D61, D66, D67, D68, D69, D610, D611, D612, D613, D614, D615, D616],
                [D71, D76, D77, D78, D79, D710, D711, D712, D713, D714, D715, D716],
            ];
            for (r, row) in rows.iter().enumerate() {
                let v = comb(&[
                    (row[0], &k[0]),
                    (row[1], &k[5]),
                    (row[2], &k[6]),
                    (row[3], &k[7]),
                    (row[4], &k[8]),
                    (row[5], &k[9]),
                    (row[6], &k[10]),
                    (row[7], &k[11]),
                    (row[8], &k13),
                    (row[9], &k14),
                    (row[10], &k15),
                    (row[11], &k16),
                ]);
                for i in 0..N {
                    coef[4 + r][i] = h * v[i];
                }
            }
            k13
        }
    };
    Ok(Accepted { k_last, dense: DenseSegment { t0: t, h, t_end: t + h, method, coef } })
}
