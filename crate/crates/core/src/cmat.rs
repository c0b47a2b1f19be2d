//! Dense 2x2 complex matrices: the ambient arena for SL(2,C) and its
//! subgroups. Thin helpers over `nalgebra::Matrix2<Complex<f64>>`.

use nalgebra::Matrix2;
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMat2 = Matrix2<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn identity() -> CMat2 {
    CMat2::identity()
}

/// Frobenius norm.
pub fn frob(m: &CMat2) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_finite(m: &CMat2) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn det(m: &CMat2) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

pub fn inverse(m: &CMat2) -> CMat2 {
    let d = det(m);
    CMat2::new(m[(1, 1)] / d, -m[(0, 1)] / d, -m[(1, 0)] / d, m[(0, 0)] / d)
}

pub fn commutator(a: &CMat2, b: &CMat2) -> CMat2 {
    a * b - b * a
}

/// Exponential of a traceless 2x2 matrix.
///
/// Cayley-Hamilton gives `X^2 = -det(X) I`, so with `d = sqrt(-det X)`
/// `exp(X) = cosh(d) I + sinh(d)/d X`, with the even/odd functions making the
/// branch of the square root irrelevant.
pub fn exp_traceless(x: &CMat2) -> CMat2 {
    let d2 = -det(x);
    let d = d2.sqrt();
    let (ch, shd) = if d.norm() < 1e-8 {
        // series in d^2 to avoid 0/0
        (
            c(1.0, 0.0) + d2 / 2.0 + d2 * d2 / 24.0,
            c(1.0, 0.0) + d2 / 6.0 + d2 * d2 / 120.0,
        )
    } else {
        (d.cosh(), d.sinh() / d)
    };
    CMat2::identity() * ch + x * shd
}

/// Unitary polar factor via the Newton iteration `X <- (X + (X^*)^-1)/2`,
/// then a determinant phase fix so the result lands in SU(2).
pub fn project_su2(m: &CMat2) -> CMat2 {
    let mut x = *m;
    for _ in 0..20 {
        let next = (x + inverse(&x.adjoint())) * c(0.5, 0.0);
        if frob(&(next - x)) < 1e-15 {
            x = next;
            break;
        }
        x = next;
    }
    let d = det(&x);
    x / d.sqrt()
}

/// JSON shape for complex matrices: nested rows of `[re, im]` pairs.
pub fn to_json(m: &CMat2) -> serde_json::Value {
    serde_json::json!([
        [[m[(0, 0)].re, m[(0, 0)].im], [m[(0, 1)].re, m[(0, 1)].im]],
        [[m[(1, 0)].re, m[(1, 0)].im], [m[(1, 1)].re, m[(1, 1)].im]]
    ])
}

pub fn from_json(v: &serde_json::Value) -> Option<CMat2> {
    let row = |i: usize, j: usize| -> Option<C64> {
        let pair = v.get(i)?.get(j)?;
        Some(c(pair.get(0)?.as_f64()?, pair.get(1)?.as_f64()?))
    };
    Some(CMat2::new(row(0, 0)?, row(0, 1)?, row(1, 0)?, row(1, 1)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn inverse_and_det() {
        let m = CMat2::new(c(1.0, 0.5), c(0.2, -0.1), c(0.0, 0.3), c(2.0, 0.0));
        let p = m * inverse(&m);
        assert!(frob(&(p - identity())) < 1e-14);
        assert_relative_eq!(det(&identity()).re, 1.0);
    }

    #[test]
    fn exp_traceless_of_zero_and_nilpotent() {
        assert!(frob(&(exp_traceless(&CMat2::zeros()) - identity())) < 1e-15);
        // nilpotent N: exp(N) = I + N exactly
        let n = CMat2::new(c(0.0, 0.0), c(0.7, -0.2), c(0.0, 0.0), c(0.0, 0.0));
        assert!(frob(&(exp_traceless(&n) - (identity() + n))) < 1e-15);
    }

    #[test]
    fn exp_traceless_has_unit_determinant() {
        let x = CMat2::new(c(0.3, 0.1), c(-0.4, 0.9), c(0.2, 0.2), c(-0.3, -0.1));
        let e = exp_traceless(&x);
        assert_relative_eq!(det(&e).re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(det(&e).im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn project_su2_recovers_unitary() {
        // perturb a unitary matrix and project back
        let x = CMat2::new(c(0.0, 0.4), c(-0.3, 0.2), c(0.3, 0.2), c(0.0, -0.4));
        let u = exp_traceless(&x);
        let drifted = u + CMat2::new(c(1e-6, 0.0), c(0.0, -2e-6), c(1e-6, 1e-6), c(0.0, 0.0));
        let back = project_su2(&drifted);
        assert!(frob(&(back.adjoint() * back - identity())) < 1e-14);
        assert!(frob(&(back - u)) < 1e-5);
        assert_relative_eq!(det(&back).re, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn json_round_trip() {
        let m = CMat2::new(c(1.25, -0.5), c(0.0, 0.125), c(3.0, 0.0), c(-1.0, 2.0));
        let back = from_json(&to_json(&m)).unwrap();
        assert_eq!(m, back);
    }
}
