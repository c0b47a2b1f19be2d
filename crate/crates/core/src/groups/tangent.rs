//! Trivialized tangent towers over a matrix group: the tangent group
//! `TG = G x g`, the second-order tangent group `T^2G = G x g x g`, and the
//! iterated tangent group `TTG = G x g x g x g`, together with the cocycles
//! and the maps relating their realizations.

use super::MatrixGroup;
use crate::cmat::{self, CMat2};
use crate::kernel::Coords;
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct TgElement {
    pub g: CMat2,
    pub xi: Coords,
}

#[derive(Debug, Clone, PartialEq)]
pub struct T2gElement {
    pub g: CMat2,
    pub xi: Coords,
    pub xidot: Coords,
}

/// Element of `TTG` in the realization `(G |x g1) |x (g2 |x g3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TtgElement {
    pub g: CMat2,
    pub xi1: Coords,
    pub xi2: Coords,
    pub xi3: Coords,
}

/// Element of the alternative realization `(G |x g2) |x (g1 x g3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TtgAltElement {
    pub g: CMat2,
    /// fiber of the inner tangent group (the `xi2` slot)
    pub a: Coords,
    pub x: Coords,
    pub y: Coords,
}

pub fn tg_identity(grp: &MatrixGroup) -> TgElement {
    TgElement {
        g: grp.identity(),
        xi: grp.algebra.zero(),
    }
}

pub fn tg_mul(grp: &MatrixGroup, p: &TgElement, q: &TgElement) -> TgElement {
    let ginv = cmat::inverse(&q.g);
    TgElement {
        g: p.g * q.g,
        xi: &q.xi + grp.ad(&ginv, &p.xi),
    }
}

pub fn tg_inv(grp: &MatrixGroup, p: &TgElement) -> TgElement {
    TgElement {
        g: cmat::inverse(&p.g),
        xi: -grp.ad(&p.g, &p.xi),
    }
}

pub fn t2g_identity(grp: &MatrixGroup) -> T2gElement {
    T2gElement {
        g: grp.identity(),
        xi: grp.algebra.zero(),
        xidot: grp.algebra.zero(),
    }
}

pub fn t2g_mul(grp: &MatrixGroup, p: &T2gElement, q: &T2gElement) -> T2gElement {
    let ginv = cmat::inverse(&q.g);
    let shifted = grp.ad(&ginv, &p.xi);
    T2gElement {
        g: p.g * q.g,
        xi: &q.xi + &shifted,
        xidot: &q.xidot + grp.ad(&ginv, &p.xidot) - grp.algebra.bracket(&q.xi, &shifted),
    }
}

pub fn t2g_inv(grp: &MatrixGroup, p: &T2gElement) -> T2gElement {
    T2gElement {
        g: cmat::inverse(&p.g),
        xi: -grp.ad(&p.g, &p.xi),
        xidot: -grp.ad(&p.g, &p.xidot),
    }
}

/// The 2-cocycle carried by `T^2G` over `TG`:
/// `phi((g,xi),(g~,xi~)) = -[xi~, Ad_{g~^-1} xi]`.
pub fn phi_cocycle(grp: &MatrixGroup, p: &TgElement, q: &TgElement) -> Coords {
    let shifted = grp.ad(&cmat::inverse(&q.g), &p.xi);
    -grp.algebra.bracket(&q.xi, &shifted)
}

/// Coboundary of `phi` at a triple; vanishes identically for a cocycle. The
/// right `TG`-action on the coefficients is `v <| (g,xi) = Ad_{g^-1} v`.
pub fn phi_coboundary_residual(
    grp: &MatrixGroup,
    p: &TgElement,
    q: &TgElement,
    r: &TgElement,
) -> f64 {
    let d = phi_cocycle(grp, q, r) - phi_cocycle(grp, &tg_mul(grp, p, q), r)
        + phi_cocycle(grp, p, &tg_mul(grp, q, r))
        - grp.ad(&cmat::inverse(&r.g), &phi_cocycle(grp, p, q));
    d.amax()
}

pub fn ttg_identity(grp: &MatrixGroup) -> TtgElement {
    TtgElement {
        g: grp.identity(),
        xi1: grp.algebra.zero(),
        xi2: grp.algebra.zero(),
        xi3: grp.algebra.zero(),
    }
}

pub fn ttg_mul(grp: &MatrixGroup, p: &TtgElement, q: &TtgElement) -> TtgElement {
    let ginv = cmat::inverse(&q.g);
    let s2 = grp.ad(&ginv, &p.xi2);
    TtgElement {
        g: p.g * q.g,
        xi1: &q.xi1 + grp.ad(&ginv, &p.xi1),
        xi2: &q.xi2 + &s2,
        xi3: &q.xi3 + grp.ad(&ginv, &p.xi3) + grp.algebra.bracket(&s2, &q.xi1),
    }
}

pub fn ttg_inv(grp: &MatrixGroup, p: &TtgElement) -> TtgElement {
    TtgElement {
        g: cmat::inverse(&p.g),
        xi1: -grp.ad(&p.g, &p.xi1),
        xi2: -grp.ad(&p.g, &p.xi2),
        xi3: grp.ad(&p.g, &(grp.algebra.bracket(&p.xi2, &p.xi1) - &p.xi3)),
    }
}

/// Realization change `(g,x1,x2,x3) -> (g,x2,x1,x3 + [x1,x2])`.
pub fn ttg_to_alt(grp: &MatrixGroup, p: &TtgElement) -> TtgAltElement {
    TtgAltElement {
        g: p.g,
        a: p.xi2.clone(),
        x: p.xi1.clone(),
        y: &p.xi3 + grp.algebra.bracket(&p.xi1, &p.xi2),
    }
}

/// Inverse realization change `(g,a;x,y) -> (g,x,a,y - [x,a])`.
pub fn ttg_from_alt(grp: &MatrixGroup, p: &TtgAltElement) -> TtgElement {
    TtgElement {
        g: p.g,
        xi1: p.x.clone(),
        xi2: p.a.clone(),
        xi3: &p.y - grp.algebra.bracket(&p.x, &p.a),
    }
}

/// Group law of the alternative realization `TG |x Lie(TG)`: the `TG` parts
/// multiply as a tangent group and the fiber is shifted by the adjoint of
/// `TG` on its Lie algebra, `AD_{(h,b)^-1}(x,y) = (Ad_{h^-1}x, Ad_{h^-1}y - [b, Ad_{h^-1}x])`.
pub fn ttg_alt_mul(grp: &MatrixGroup, p: &TtgAltElement, q: &TtgAltElement) -> TtgAltElement {
    let base = tg_mul(
        grp,
        &TgElement {
            g: p.g,
            xi: p.a.clone(),
        },
        &TgElement {
            g: q.g,
            xi: q.a.clone(),
        },
    );
    let hinv = cmat::inverse(&q.g);
    let shifted_x = grp.ad(&hinv, &p.x);
    TtgAltElement {
        g: base.g,
        a: base.xi,
        x: &q.x + &shifted_x,
        y: &q.y + grp.ad(&hinv, &p.y) - grp.algebra.bracket(&q.a, &shifted_x),
    }
}

pub fn ttg_alt_identity(grp: &MatrixGroup) -> TtgAltElement {
    ttg_to_alt(grp, &ttg_identity(grp))
}

/// Inclusion of `T^2G` into `TTG`, `(g,xi,xidot) -> (g,xi,xi,xidot)`.
pub fn ttg_include_t2g(p: &T2gElement) -> TtgElement {
    TtgElement {
        g: p.g,
        xi1: p.xi.clone(),
        xi2: p.xi.clone(),
        xi3: p.xidot.clone(),
    }
}

/// Inclusion of the abelian group `g` into `TTG`, `xi -> (e,xi,0,0)`.
pub fn ttg_include_alg(grp: &MatrixGroup, xi: &Coords) -> TtgElement {
    TtgElement {
        g: grp.identity(),
        xi1: xi.clone(),
        xi2: grp.algebra.zero(),
        xi3: grp.algebra.zero(),
    }
}

/// Product map of the decomposition `TTG = g |><| T^2G`:
/// `(xi~, (g,xi,xidot)) -> (g, xi + Ad_{g^-1} xi~, xi, xidot)`.
pub fn ttg_assemble(grp: &MatrixGroup, xi_tilde: &Coords, jet: &T2gElement) -> TtgElement {
    let shifted = grp.ad(&cmat::inverse(&jet.g), xi_tilde);
    TtgElement {
        g: jet.g,
        xi1: &jet.xi + shifted,
        xi2: jet.xi.clone(),
        xi3: jet.xidot.clone(),
    }
}

/// Closed-form inverse of [`ttg_assemble`]: `xi~ = Ad_g(x1 - x2)`.
pub fn ttg_split(grp: &MatrixGroup, p: &TtgElement) -> (Coords, T2gElement) {
    let xi_tilde = grp.ad(&p.g, &(&p.xi1 - &p.xi2));
    (
        xi_tilde,
        T2gElement {
            g: p.g,
            xi: p.xi2.clone(),
            xidot: p.xi3.clone(),
        },
    )
}

/// Mutual actions of the matched pair `(g, T^2G)`:
/// `(g,xi,xidot) |> xi~ = Ad_g xi~` and
/// `(g,xi,xidot) <| xi~ = (g, xi, xidot + [xi, xi~])`.
pub fn g_t2g_actions(
    grp: &MatrixGroup,
    jet: &T2gElement,
    xi_tilde: &Coords,
) -> (Coords, T2gElement) {
    let left = grp.ad(&jet.g, xi_tilde);
    let right = T2gElement {
        g: jet.g,
        xi: jet.xi.clone(),
        xidot: &jet.xidot + grp.algebra.bracket(&jet.xi, xi_tilde),
    };
    (left, right)
}

/// Group law of the fiber `TT_eG`:
/// `(u1,u2,u3)(v1,v2,v3) = (v1+u1, v2+u2, v3+u3+[u2,v1])`.
pub fn tte_mul(
    grp: &MatrixGroup,
    u: (&Coords, &Coords, &Coords),
    v: (&Coords, &Coords, &Coords),
) -> (Coords, Coords, Coords) {
    (
        v.0 + u.0,
        v.1 + u.1,
        v.2 + u.2 + grp.algebra.bracket(u.1, v.0),
    )
}

/// The 2-cocycle presenting `TTG` over `G |x (g1 x g2)`:
/// `phi((g,u1,u2),(g~,v1,v2)) = [Ad_{g~^-1} u2, v1]`.
pub fn phi_ttg(
    grp: &MatrixGroup,
    p: (&CMat2, &Coords, &Coords),
    q: (&CMat2, &Coords, &Coords),
) -> Coords {
    grp.algebra.bracket(&grp.ad(&cmat::inverse(q.0), p.2), q.1)
}

/// Coboundary of [`phi_ttg`] at a triple (zero for a cocycle). The base group
/// is `G |x (g1 x g2)` with the diagonal adjoint action, and the coefficient
/// action is `v <| (g,..) = Ad_{g^-1} v`.
pub fn phi_ttg_coboundary_residual(
    grp: &MatrixGroup,
    p: (&CMat2, &Coords, &Coords),
    q: (&CMat2, &Coords, &Coords),
    r: (&CMat2, &Coords, &Coords),
) -> f64 {
    let mul = |a: (&CMat2, &Coords, &Coords), b: (&CMat2, &Coords, &Coords)| {
        let binv = cmat::inverse(b.0);
        (
            a.0 * b.0,
            b.1 + grp.ad(&binv, a.1),
            b.2 + grp.ad(&binv, a.2),
        )
    };
    let pq = mul(p, q);
    let qr = mul(q, r);
    let d = phi_ttg(grp, q, r) - phi_ttg(grp, (&pq.0, &pq.1, &pq.2), r)
        + phi_ttg(grp, p, (&qr.0, &qr.1, &qr.2))
        - grp.ad(&cmat::inverse(r.0), &phi_ttg(grp, p, q));
    d.amax()
}

/// The abelian-by-abelian cocycle on the fiber:
/// `chi((u1,u2),(v1,v2)) = [u2, v1]`.
pub fn chi_cocycle(grp: &MatrixGroup, u: (&Coords, &Coords), v: (&Coords, &Coords)) -> Coords {
    grp.algebra.bracket(u.1, v.0)
}

/// Coboundary of [`chi_cocycle`] (the base group is additive, the coefficient
/// action trivial).
pub fn chi_coboundary_residual(
    grp: &MatrixGroup,
    u: (&Coords, &Coords),
    v: (&Coords, &Coords),
    w: (&Coords, &Coords),
) -> f64 {
    let uv = (u.0 + v.0, u.1 + v.1);
    let vw = (v.0 + w.0, v.1 + w.1);
    let d = chi_cocycle(grp, v, w) - chi_cocycle(grp, (&uv.0, &uv.1), w)
        + chi_cocycle(grp, u, (&vw.0, &vw.1))
        - chi_cocycle(grp, u, v);
    d.amax()
}

impl TgElement {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "g": cmat::to_json(&self.g), "xi": self.xi.as_slice() })
    }

    pub fn from_json(v: &serde_json::Value) -> Option<Self> {
        Some(TgElement {
            g: cmat::from_json(v.get("g")?)?,
            xi: Coords::from_vec(serde_json::from_value(v.get("xi")?.clone()).ok()?),
        })
    }
}

impl T2gElement {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "g": cmat::to_json(&self.g),
            "xi": self.xi.as_slice(),
            "xidot": self.xidot.as_slice(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Option<Self> {
        Some(T2gElement {
            g: cmat::from_json(v.get("g")?)?,
            xi: Coords::from_vec(serde_json::from_value(v.get("xi")?.clone()).ok()?),
            xidot: Coords::from_vec(serde_json::from_value(v.get("xidot")?.clone()).ok()?),
        })
    }
}

impl TtgElement {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "g": cmat::to_json(&self.g),
            "xi1": self.xi1.as_slice(),
            "xi2": self.xi2.as_slice(),
            "xi3": self.xi3.as_slice(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Option<Self> {
        Some(TtgElement {
            g: cmat::from_json(v.get("g")?)?,
            xi1: Coords::from_vec(serde_json::from_value(v.get("xi1")?.clone()).ok()?),
            xi2: Coords::from_vec(serde_json::from_value(v.get("xi2")?.clone()).ok()?),
            xi3: Coords::from_vec(serde_json::from_value(v.get("xi3")?.clone()).ok()?),
        })
    }
}

/// Distance helpers used by the verification suites.
pub fn tg_dist(p: &TgElement, q: &TgElement) -> f64 {
    cmat::frob(&(p.g - q.g)).max((&p.xi - &q.xi).amax())
}

pub fn t2g_dist(p: &T2gElement, q: &T2gElement) -> f64 {
    cmat::frob(&(p.g - q.g))
        .max((&p.xi - &q.xi).amax())
        .max((&p.xidot - &q.xidot).amax())
}

pub fn ttg_dist(p: &TtgElement, q: &TtgElement) -> f64 {
    cmat::frob(&(p.g - q.g))
        .max((&p.xi1 - &q.xi1).amax())
        .max((&p.xi2 - &q.xi2).amax())
        .max((&p.xi3 - &q.xi3).amax())
}

pub fn ttg_alt_dist(p: &TtgAltElement, q: &TtgAltElement) -> f64 {
    cmat::frob(&(p.g - q.g))
        .max((&p.a - &q.a).amax())
        .max((&p.x - &q.x).amax())
        .max((&p.y - &q.y).amax())
}

pub fn random_tg<R: Rng>(grp: &MatrixGroup, rng: &mut R) -> TgElement {
    TgElement {
        g: grp.random_element(rng),
        xi: grp.random_algebra_vec(rng),
    }
}

pub fn random_t2g<R: Rng>(grp: &MatrixGroup, rng: &mut R) -> T2gElement {
    T2gElement {
        g: grp.random_element(rng),
        xi: grp.random_algebra_vec(rng),
        xidot: grp.random_algebra_vec(rng),
    }
}

pub fn random_ttg<R: Rng>(grp: &MatrixGroup, rng: &mut R) -> TtgElement {
    TtgElement {
        g: grp.random_element(rng),
        xi1: grp.random_algebra_vec(rng),
        xi2: grp.random_algebra_vec(rng),
        xi3: grp.random_algebra_vec(rng),
    }
}
