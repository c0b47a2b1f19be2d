//! Matched pairs of matrix groups. The mutual group actions are never
//! hand-coded: they come from refactorizing products in the ambient group
//! (`h g = (h |> g)(h <| g)`), and every derivative lift is a central
//! difference along a one-parameter subgroup. The closed-form second-order
//! action formulas are implemented independently so the two routes can be
//! compared.

use super::{GroupError, MatrixGroup, T2gElement};
use crate::algebra::MatchedPair;
use crate::cmat::{self, CMat2};
use crate::kernel::Coords;
use num_complex::Complex;

/// Iwasawa-type factorization of `m` in SL(2,C): `m = u t` with `u` in SU(2)
/// and `t` upper triangular with positive real diagonal. Gram-Schmidt on the
/// columns; uniqueness makes any other route agree.
pub fn factorize_su2k(m: &CMat2) -> Result<(CMat2, CMat2), GroupError> {
    let d = cmat::det(m);
    if (d - Complex::new(1.0, 0.0)).norm() > 1e-10 {
        return Err(GroupError::NotInGroup {
            group: "SL(2,C)",
            residual: (d - Complex::new(1.0, 0.0)).norm(),
        });
    }
    let (a, c) = (m[(0, 0)], m[(1, 0)]);
    let (b, e) = (m[(0, 1)], m[(1, 1)]);
    let r1 = (a.norm_sqr() + c.norm_sqr()).sqrt();
    if r1 < 1e-12 {
        return Err(GroupError::FactorizationFailed(
            "first column is numerically zero".into(),
        ));
    }
    let u1 = (a / r1, c / r1);
    let proj = u1.0.conj() * b + u1.1.conj() * e;
    let w = (b - u1.0 * proj, e - u1.1 * proj);
    let r2 = (w.0.norm_sqr() + w.1.norm_sqr()).sqrt();
    if r2 < 1e-12 {
        return Err(GroupError::FactorizationFailed(
            "columns are numerically dependent".into(),
        ));
    }
    let u2 = (w.0 / r2, w.1 / r2);
    let u = CMat2::new(u1.0, u2.0, u1.1, u2.1);
    let t = CMat2::new(
        Complex::new(r1, 0.0),
        proj,
        Complex::new(0.0, 0.0),
        Complex::new(r2, 0.0),
    );
    Ok((u, t))
}

/// Fourth-order central difference of a matrix curve.
fn fd_matrix<F>(curve: F, t: f64, h: f64) -> Result<CMat2, GroupError>
where
    F: Fn(f64) -> Result<CMat2, GroupError>,
{
    Ok(
        (-curve(t + 2.0 * h)? + curve(t + h)? * Complex::new(8.0, 0.0)
            - curve(t - h)? * Complex::new(8.0, 0.0)
            + curve(t - 2.0 * h)?)
            / Complex::new(12.0 * h, 0.0),
    )
}

/// Left-trivialized 2-jet of a total matrix curve, by nested central
/// differences: `xi(t) = vee(c(t)^-1 c'(t))`, then `xi'(0)`.
pub fn trivialized_jet2<F>(curve: F, vee: fn(&CMat2) -> Coords, fd1: f64, fd2: f64) -> T2gElement
where
    F: Fn(f64) -> CMat2,
{
    let log_deriv = |t: f64| -> Coords {
        let m = curve(t);
        let d = (-curve(t + 2.0 * fd1) + curve(t + fd1) * Complex::new(8.0, 0.0)
            - curve(t - fd1) * Complex::new(8.0, 0.0)
            + curve(t - 2.0 * fd1))
            / Complex::new(12.0 * fd1, 0.0);
        vee(&(cmat::inverse(&m) * d))
    };
    let xi = log_deriv(0.0);
    let xidot = (-log_deriv(2.0 * fd2) + log_deriv(fd2) * 8.0 - log_deriv(-fd2) * 8.0
        + log_deriv(-2.0 * fd2))
        / (12.0 * fd2);
    T2gElement {
        g: curve(0.0),
        xi,
        xidot,
    }
}

/// Oracle for the second-order tangent group law: represent both jets by the
/// curves `g exp(t v + t^2/2 vdot)`, multiply the curves pointwise, and
/// trivialize the product's 2-jet numerically. Never invokes the law itself.
pub fn jet2_multiply_oracle(
    grp: &MatrixGroup,
    p: &T2gElement,
    q: &T2gElement,
    fd1: f64,
    fd2: f64,
) -> T2gElement {
    let cp = |t: f64| p.g * grp.exp(&(&p.xi * t + &p.xidot * (0.5 * t * t)));
    let cq = |t: f64| q.g * grp.exp(&(&q.xi * t + &q.xidot * (0.5 * t * t)));
    trivialized_jet2(|t| cp(t) * cq(t), grp.vee, fd1, fd2)
}

/// A matched pair of matrix groups inside a common ambient group, together
/// with the matched pair of Lie algebras obtained by splitting the ambient
/// bracket.
#[derive(Debug, Clone)]
pub struct GroupPair {
    pub g: MatrixGroup,
    pub h: MatrixGroup,
    pub tensors: MatchedPair,
    pub factorize: fn(&CMat2) -> Result<(CMat2, CMat2), GroupError>,
    /// step for derivative lifts along one-parameter subgroups
    pub fd_step: f64,
    /// step for the outer derivative when trivializing 2-jets
    pub jet_fd_step: f64,
}

impl GroupPair {
    /// Mutual actions from the defining relation `h g = (h |> g)(h <| g)`.
    pub fn group_actions(&self, h: &CMat2, g: &CMat2) -> Result<(CMat2, CMat2), GroupError> {
        (self.factorize)(&(h * g))
    }

    /// Double cross product multiplication
    /// `(g,h)(g~,h~) = (g (h |> g~), (h <| g~) h~)`.
    pub fn dcp_mul(
        &self,
        p: &(CMat2, CMat2),
        q: &(CMat2, CMat2),
    ) -> Result<(CMat2, CMat2), GroupError> {
        let (hg, hk) = self.group_actions(&p.1, &q.0)?;
        Ok((p.0 * hg, hk * q.1))
    }

    pub fn dcp_identity(&self) -> (CMat2, CMat2) {
        (cmat::identity(), cmat::identity())
    }

    /// Inverse by refactorizing the ambient inverse.
    pub fn dcp_inv(&self, p: &(CMat2, CMat2)) -> Result<(CMat2, CMat2), GroupError> {
        (self.factorize)(&cmat::inverse(&(p.0 * p.1)))
    }

    /// Residuals of the two group-level compatibility identities and of the
    /// reassembly `(h |> g)(h <| g) = h g`, at concrete elements.
    pub fn compatibility_residual(
        &self,
        h: &CMat2,
        ht: &CMat2,
        g: &CMat2,
        gt: &CMat2,
    ) -> Result<f64, GroupError> {
        let (hg, hk) = self.group_actions(h, g)?;
        let reassembly = cmat::frob(&(hg * hk - h * g));
        // h |> (g g~) = (h |> g)((h <| g) |> g~)
        let lhs = self.group_actions(h, &(g * gt))?.0;
        let rhs = hg * self.group_actions(&hk, gt)?.0;
        let first = cmat::frob(&(lhs - rhs));
        // (h h~) <| g = (h <| (h~ |> g)) (h~ <| g)
        let (ht_g, ht_k) = self.group_actions(ht, g)?;
        let lhs = self.group_actions(&(h * ht), g)?.1;
        let rhs = self.group_actions(h, &ht_g)?.1 * ht_k;
        let second = cmat::frob(&(lhs - rhs));
        Ok(reassembly.max(first).max(second))
    }

    // ---- derivative lifts -------------------------------------------------

    /// `hbar |> zeta` for `zeta` in g: derivative at 0 of `s -> hbar |> exp(s zeta)`.
    pub fn act_h_on_galg(&self, hbar: &CMat2, zeta: &Coords) -> Result<Coords, GroupError> {
        let d = fd_matrix(
            |s| Ok(self.group_actions(hbar, &self.g.exp(&(zeta * s)))?.0),
            0.0,
            self.fd_step,
        )?;
        Ok((self.g.vee)(&d))
    }

    /// `T_g L_{g^-1} (eta |> g)`: left-trivialized derivative of the G-factor
    /// of `exp(s eta) g`.
    pub fn lift_alg_h_on_g(&self, eta: &Coords, g: &CMat2) -> Result<Coords, GroupError> {
        let d = fd_matrix(
            |s| Ok(self.group_actions(&self.h.exp(&(eta * s)), g)?.0),
            0.0,
            self.fd_step,
        )?;
        Ok((self.g.vee)(&(cmat::inverse(g) * d)))
    }

    /// `eta <| g` in h: derivative at 0 of the H-factor of `exp(s eta) g`.
    pub fn act_alg_h_by_g(&self, eta: &Coords, g: &CMat2) -> Result<Coords, GroupError> {
        let d = fd_matrix(
            |s| Ok(self.group_actions(&self.h.exp(&(eta * s)), g)?.1),
            0.0,
            self.fd_step,
        )?;
        Ok((self.h.vee)(&d))
    }

    /// `T_hbar L_{hbar^-1} (hbar <| zeta)` for `zeta` in g.
    pub fn lift_h_act_by_galg(&self, hbar: &CMat2, zeta: &Coords) -> Result<Coords, GroupError> {
        let d = fd_matrix(
            |s| Ok(self.group_actions(hbar, &self.g.exp(&(zeta * s)))?.1),
            0.0,
            self.fd_step,
        )?;
        Ok((self.h.vee)(&(cmat::inverse(hbar) * d)))
    }

    // ---- second-order mutual actions --------------------------------------

    /// Closed-form mutual actions of `T^2H` on `T^2G` and back, assembled
    /// exactly as displayed: algebra actions come from the stored tensors and
    /// all group-level derivative lifts from central differences.
    pub fn t2_actions_closed_form(
        &self,
        hjet: &T2gElement,
        gjet: &T2gElement,
    ) -> Result<(T2gElement, T2gElement), GroupError> {
        let (eta, etadot) = (&hjet.xi, &hjet.xidot);
        let (xi, xidot) = (&gjet.xi, &gjet.xidot);
        let (ghat, hbar) = self.group_actions(&hjet.g, &gjet.g)?;

        let lam = self.lift_alg_h_on_g(eta, &gjet.g)?;
        let lam_dot = self.lift_alg_h_on_g(etadot, &gjet.g)?;
        let ag = self.act_alg_h_by_g(eta, &gjet.g)?;
        let xi_plus = xi + &lam;
        let xidot_plus =
            xidot + &lam_dot - self.g.algebra.bracket(xi, &lam) + self.tensors.act_left(&ag, xi);
        let l3 = self.lift_h_act_by_galg(&hbar, &xi_plus)?;

        // left action of T^2H on T^2G
        let w = self.tensors.act_left(&ag, &xi_plus)
            + self.tensors.act_left(&l3, &xi_plus)
            + &xidot_plus;
        let left = T2gElement {
            g: ghat,
            xi: self.act_h_on_galg(&hbar, &xi_plus)?,
            xidot: self.act_h_on_galg(&hbar, &w)?,
        };

        // right action of T^2G on T^2H
        let b1 = &ag + &l3;
        let slot3 = self.act_alg_h_by_g(etadot, &gjet.g)?
            + self.tensors.act_right(&ag, xi)
            + self.tensors.act_right(&b1, &xi_plus)
            + self.lift_h_act_by_galg(&hbar, &w)?
            + self.h.algebra.bracket(&b1, &ag);
        let right = T2gElement {
            g: hbar,
            xi: b1,
            xidot: slot3,
        };
        Ok((left, right))
    }

    /// 2-jet of the curve `t -> base exp(t v + t^2/2 vdot)` in the given
    /// factor group.
    fn jet_curve<'a>(grp: &'a MatrixGroup, jet: &T2gElement) -> impl Fn(f64) -> CMat2 + 'a {
        let base = jet.g;
        let v = jet.xi.clone();
        let vdot = jet.xidot.clone();
        move |t: f64| base * grp.exp(&(&v * t + &vdot * (0.5 * t * t)))
    }

    /// Left-trivialized 2-jet of a smooth matrix curve, extracted with nested
    /// central differences: `xi(t) = vee(c(t)^-1 c'(t))`, then `xi'(0)`.
    fn trivialized_jet<F>(
        &self,
        curve: F,
        vee: fn(&CMat2) -> Coords,
    ) -> Result<T2gElement, GroupError>
    where
        F: Fn(f64) -> Result<CMat2, GroupError>,
    {
        let log_deriv = |t: f64| -> Result<Coords, GroupError> {
            let m = curve(t)?;
            let d = fd_matrix(&curve, t, self.fd_step)?;
            Ok(vee(&(cmat::inverse(&m) * d)))
        };
        let h2 = self.jet_fd_step;
        let xi = log_deriv(0.0)?;
        let xidot = (-log_deriv(2.0 * h2)? + log_deriv(h2)? * 8.0 - log_deriv(-h2)? * 8.0
            + log_deriv(-2.0 * h2)?)
            / (12.0 * h2);
        Ok(T2gElement {
            g: curve(0.0)?,
            xi,
            xidot,
        })
    }

    /// Factorization-derived mutual actions: represent both jets by curves,
    /// multiply the curves in the ambient group, factorize pointwise, and
    /// trivialize the 2-jets of the two factor curves. Independent of the
    /// closed-form display.
    pub fn t2_actions_factorized(
        &self,
        hjet: &T2gElement,
        gjet: &T2gElement,
    ) -> Result<(T2gElement, T2gElement), GroupError> {
        let ch = Self::jet_curve(&self.h, hjet);
        let cg = Self::jet_curve(&self.g, gjet);
        let u_curve =
            |t: f64| -> Result<CMat2, GroupError> { Ok((self.factorize)(&(ch(t) * cg(t)))?.0) };
        let t_curve =
            |t: f64| -> Result<CMat2, GroupError> { Ok((self.factorize)(&(ch(t) * cg(t)))?.1) };
        let left = self.trivialized_jet(u_curve, self.g.vee)?;
        let right = self.trivialized_jet(t_curve, self.h.vee)?;
        Ok((left, right))
    }
}
