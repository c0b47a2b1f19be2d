//! Residual evaluators for the trivialized Euler-Lagrange systems on sampled
//! holonomic curves. Time derivatives are fourth-order grid stencils, group
//! derivatives are directional differences along left-translated basis
//! directions; nothing here calls the equation-of-motion fields, so these
//! evaluators stay independent of the integrators they are used to check.

use super::{DynamicsError, MatchedSoLagrangian, SoLagrangian};
use crate::cmat::{self, CMat2};
use crate::groups::{GroupPair, MatrixGroup};
use crate::kernel::{fd_derivative_grid, fd_derivative_scalar, Coords, DEFAULT_FD_STEP};
use rand::Rng;

/// Scalar potential on the two group factors.
pub type PairPotential<'a> = &'a dyn Fn(&CMat2, &CMat2) -> f64;

/// A holonomic curve in `T^2G`, sampled on a uniform grid: base points,
/// left-trivialized velocities, and (optionally) exact second slots. When the
/// second slot is absent it is recovered by differentiating `xi` on the grid.
#[derive(Clone)]
pub struct JetCurve {
    pub dt: f64,
    pub g: Vec<CMat2>,
    pub xi: Vec<Coords>,
    pub xidot: Option<Vec<Coords>>,
}

impl JetCurve {
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    fn xidot_at(&self, k: usize) -> Coords {
        match &self.xidot {
            Some(v) => v[k].clone(),
            None => fd_derivative_grid(&self.xi, k, self.dt),
        }
    }

    /// Sample closures on `[t0, t1]`.
    pub fn from_closures<G, X>(g_fn: G, xi_fn: X, t0: f64, t1: f64, dt: f64) -> Self
    where
        G: Fn(f64) -> CMat2,
        X: Fn(f64) -> Coords,
    {
        let n = ((t1 - t0) / dt).round() as usize;
        let mut g = Vec::with_capacity(n + 1);
        let mut xi = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let t = t0 + k as f64 * dt;
            g.push(g_fn(t));
            xi.push(xi_fn(t));
        }
        JetCurve {
            dt,
            g,
            xi,
            xidot: None,
        }
    }
}

/// `T*_e L_g (dL/dg)` for a Lagrangian whose group dependence is the scalar
/// `potential`: component `i` is the derivative of `s -> V(g exp(s e_i))`.
fn left_lift(grp: &MatrixGroup, potential: &dyn Fn(&CMat2) -> f64, g: &CMat2, step: f64) -> Coords {
    let n = grp.dim();
    Coords::from_fn(n, |i, _| {
        let dir = grp.algebra.basis_vec(i);
        fd_derivative_scalar(&|s: f64| potential(&(g * grp.exp(&(&dir * s)))), 0.0, step)
    })
}

/// Pointwise residual data of the first-order system on the iterated tangent
/// group, restricted to second-order jets, together with the eliminated
/// (second-order) form and the elimination identity.
#[derive(Debug, Clone)]
pub struct SoElReport {
    /// max norm of `R1 = (d/dt + ad*_xi) dL/dxi - T*L_g dL/dg + ad*_xid dL/dxid`
    pub max_r1: f64,
    /// max norm of `R2 = (d/dt + ad*_xi) dL/dxid`
    pub max_r2: f64,
    /// max norm of `RsoEL = (d/dt + ad*_xi)(dL/dxi - d/dt dL/dxid) - T*L_g dL/dg`
    pub max_rsoel: f64,
    /// max norm of `RsoEL - (R1 - dR2/dt)`
    pub max_identity: f64,
    pub nodes: usize,
}

/// Evaluate the residual triple on the interior of a sampled curve.
pub fn so_el_analysis(
    grp: &MatrixGroup,
    lag: &SoLagrangian,
    potential: Option<&dyn Fn(&CMat2) -> f64>,
    curve: &JetCurve,
) -> Result<SoElReport, DynamicsError> {
    let n = curve.len();
    if n < 14 {
        return Err(DynamicsError::BadConfig(
            "curve too short for the residual stencils".into(),
        ));
    }
    let dt = curve.dt;
    let zero = grp.algebra.zero();

    // series with explicit validity windows
    let mu1: Vec<Coords> = curve.xi.iter().map(|x| lag.m_xi.apply(x)).collect();
    let mut xidot = vec![zero.clone(); n];
    for (k, slot) in xidot.iter_mut().enumerate().take(n - 2).skip(2) {
        *slot = curve.xidot_at(k);
    }
    let mu2: Vec<Coords> = xidot.iter().map(|x| lag.m_xidot.apply(x)).collect();
    let lift: Vec<Coords> = curve
        .g
        .iter()
        .map(|g| match potential {
            Some(v) => left_lift(grp, v, g, DEFAULT_FD_STEP),
            None => zero.clone(),
        })
        .collect();

    let mut r1 = vec![zero.clone(); n];
    let mut r2 = vec![zero.clone(); n];
    let mut m_comb = vec![zero.clone(); n];
    for k in 4..n - 4 {
        r1[k] = fd_derivative_grid(&mu1, k, dt) + grp.algebra.ad_star(&curve.xi[k], &mu1[k])
            - &lift[k]
            + grp.algebra.ad_star(&xidot[k], &mu2[k]);
        r2[k] = fd_derivative_grid(&mu2, k, dt) + grp.algebra.ad_star(&curve.xi[k], &mu2[k]);
        m_comb[k] = &mu1[k] - fd_derivative_grid(&mu2, k, dt);
    }

    let mut report = SoElReport {
        max_r1: 0.0,
        max_r2: 0.0,
        max_rsoel: 0.0,
        max_identity: 0.0,
        nodes: 0,
    };
    for k in 6..n - 6 {
        let rsoel = fd_derivative_grid(&m_comb, k, dt)
            + grp.algebra.ad_star(&curve.xi[k], &m_comb[k])
            - &lift[k];
        let dr2 = fd_derivative_grid(&r2, k, dt);
        let identity = (&rsoel - (&r1[k] - dr2)).amax();
        report.max_r1 = report.max_r1.max(r1[k].amax());
        report.max_r2 = report.max_r2.max(r2[k].amax());
        report.max_rsoel = report.max_rsoel.max(rsoel.amax());
        report.max_identity = report.max_identity.max(identity);
        report.nodes += 1;
    }
    Ok(report)
}

// ---- random test data --------------------------------------------------------

/// `f(t) = c t + a sin(w1 t) + b cos(w2 t)` with bounded coefficients; smooth
/// with derivatives of modest size, so the grid stencils stay in their
/// asymptotic regime.
#[derive(Debug, Clone)]
pub struct TrigPoly {
    pub lin: f64,
    pub amp_sin: f64,
    pub w_sin: f64,
    pub amp_cos: f64,
    pub w_cos: f64,
}

impl TrigPoly {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        TrigPoly {
            lin: rng.gen_range(-0.4..0.4),
            amp_sin: rng.gen_range(-0.4..0.4),
            w_sin: rng.gen_range(0.5..2.0),
            amp_cos: rng.gen_range(-0.4..0.4),
            w_cos: rng.gen_range(0.5..2.0),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.lin * t + self.amp_sin * (self.w_sin * t).sin() + self.amp_cos * (self.w_cos * t).cos()
    }

    pub fn deriv(&self, t: f64) -> f64 {
        self.lin + self.amp_sin * self.w_sin * (self.w_sin * t).cos()
            - self.amp_cos * self.w_cos * (self.w_cos * t).sin()
    }
}

/// A random smooth holonomic curve on SU(2):
/// `g(t) = exp(hat(b1) f1(t)) exp(hat(b2) f2(t))` has the closed-form
/// logarithmic derivative `xi(t) = f1'(t) Ad_{g(t)^-1} b1 + f2'(t) b2`.
pub fn random_jet_curve<R: Rng>(
    grp: &MatrixGroup,
    rng: &mut R,
    t0: f64,
    t1: f64,
    dt: f64,
) -> JetCurve {
    let b1 = grp.random_algebra_vec(rng) * 0.8;
    let b2 = grp.random_algebra_vec(rng) * 0.8;
    let f1 = TrigPoly::random(rng);
    let f2 = TrigPoly::random(rng);
    let g_fn = |t: f64| grp.exp(&(&b1 * f1.eval(t))) * grp.exp(&(&b2 * f2.eval(t)));
    let xi_fn = |t: f64| {
        let g = g_fn(t);
        grp.ad(&cmat::inverse(&g), &b1) * f1.deriv(t) + &b2 * f2.deriv(t)
    };
    JetCurve::from_closures(g_fn, xi_fn, t0, t1, dt)
}

/// Random linear-in-the-matrix potential `V(g) = Re tr(C g)`.
pub fn random_matrix_potential<R: Rng>(rng: &mut R) -> impl Fn(&CMat2) -> f64 {
    let entries: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let c = CMat2::new(
        cmat::c(entries[0], entries[1]),
        cmat::c(entries[2], entries[3]),
        cmat::c(entries[4], entries[5]),
        cmat::c(entries[6], entries[7]),
    );
    move |g: &CMat2| (c * g).trace().re
}

/// Random symmetric positive definite quadratic form.
pub fn random_spd<R: Rng>(rng: &mut R, dim: usize) -> super::QuadraticForm {
    let a = nalgebra::DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-0.5..0.5));
    let m = &a * a.transpose() + nalgebra::DMatrix::identity(dim, dim);
    super::QuadraticForm::new(m).expect("A A^T + I is SPD")
}

// ---- matched second-order Euler-Lagrange residuals ----------------------------

/// A holonomic curve in `T^2(G |><| H)`, factor components sampled on a grid.
#[derive(Clone)]
pub struct MatchedJetCurve {
    pub dt: f64,
    pub g: Vec<CMat2>,
    pub h: Vec<CMat2>,
    pub xi: Vec<Coords>,
    pub eta: Vec<Coords>,
    pub xidot: Option<Vec<Coords>>,
    pub etadot: Option<Vec<Coords>>,
}

impl MatchedJetCurve {
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    fn xidot_at(&self, k: usize) -> Coords {
        match &self.xidot {
            Some(v) => v[k].clone(),
            None => fd_derivative_grid(&self.xi, k, self.dt),
        }
    }

    fn etadot_at(&self, k: usize) -> Coords {
        match &self.etadot {
            Some(v) => v[k].clone(),
            None => fd_derivative_grid(&self.eta, k, self.dt),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MatchedElReport {
    pub max_line1: f64,
    pub max_line2: f64,
    pub nodes: usize,
}

/// Evaluate the two lines of the second-order Euler-Lagrange system on a
/// double cross product group as residuals along a sampled curve. The dual
/// maps come from the pair's tensors (with its stored `b*` convention); the
/// group-level lifts are directional differences through the factorization.
pub fn matched_el2_analysis(
    pair: &GroupPair,
    lag: &MatchedSoLagrangian,
    potential: Option<PairPotential<'_>>,
    curve: &MatchedJetCurve,
) -> Result<MatchedElReport, DynamicsError> {
    let n = curve.len();
    if n < 14 {
        return Err(DynamicsError::BadConfig(
            "curve too short for the residual stencils".into(),
        ));
    }
    let dt = curve.dt;
    let mp = &pair.tensors;
    let (zg, zh) = (mp.g.zero(), mp.h.zero());

    let mut xidot = vec![zg.clone(); n];
    let mut etadot = vec![zh.clone(); n];
    for k in 2..n - 2 {
        xidot[k] = curve.xidot_at(k);
        etadot[k] = curve.etadot_at(k);
    }
    let mu2: Vec<Coords> = xidot.iter().map(|x| lag.xidot.apply(x)).collect();
    let nu2: Vec<Coords> = etadot.iter().map(|x| lag.etadot.apply(x)).collect();

    // group-level lift terms; all zero for a left-invariant Lagrangian
    let step = DEFAULT_FD_STEP;
    let mut lift_g = vec![zg.clone(); n];
    let mut lift_h = vec![zh.clone(); n];
    if let Some(v) = potential {
        for k in 0..n {
            let (gk, hk) = (&curve.g[k], &curve.h[k]);
            // (T*_e L_g dL/dg) <|* h, component i: <T*L_g dL/dg, h |> e_i>
            let tlg = Coords::from_fn(mp.g.dim(), |i, _| {
                let dir = mp.g.basis_vec(i);
                fd_derivative_scalar(&|s: f64| v(&(gk * pair.g.exp(&(&dir * s))), hk), 0.0, step)
            });
            let mut coacted = zg.clone();
            for i in 0..mp.g.dim() {
                let moved = pair
                    .act_h_on_galg(hk, &mp.g.basis_vec(i))
                    .map_err(DynamicsError::Group)?;
                coacted[i] = tlg.dot(&moved);
            }
            // T*_e sigma_h dL/dh, component i: derivative through h <| exp(s e_i)
            let tsig = Coords::from_fn(mp.g.dim(), |i, _| {
                let dir = mp.g.basis_vec(i);
                fd_derivative_scalar(
                    &|s: f64| {
                        let moved = pair
                            .group_actions(hk, &pair.g.exp(&(&dir * s)))
                            .map(|(_, t)| t)
                            .unwrap_or(*hk);
                        v(gk, &moved)
                    },
                    0.0,
                    step,
                )
            });
            lift_g[k] = coacted + tsig;
            // T*_e L_h dL/dh
            lift_h[k] = Coords::from_fn(mp.h.dim(), |a, _| {
                let dir = mp.h.basis_vec(a);
                fd_derivative_scalar(&|s: f64| v(gk, &(hk * pair.h.exp(&(&dir * s)))), 0.0, step)
            });
        }
    }

    let mut d_xi = vec![zg.clone(); n];
    let mut d_eta = vec![zh.clone(); n];
    for k in 4..n - 4 {
        d_xi[k] = lag.xi.apply(&curve.xi[k]) - fd_derivative_grid(&mu2, k, dt);
        d_eta[k] = lag.eta.apply(&curve.eta[k]) - fd_derivative_grid(&nu2, k, dt);
    }

    let mut report = MatchedElReport {
        max_line1: 0.0,
        max_line2: 0.0,
        nodes: 0,
    };
    for k in 6..n - 6 {
        let line1 = fd_derivative_grid(&d_xi, k, dt) + mp.g.ad_star(&curve.xi[k], &d_xi[k])
            - mp.coact_on_gstar(&d_xi[k], &curve.eta[k])
            - mp.a_star(&curve.eta[k], &d_eta[k])
            - &lift_g[k];
        let line2 = fd_derivative_grid(&d_eta, k, dt)
            + mp.h.ad_star(&curve.eta[k], &d_eta[k])
            + mp.coact_on_hstar(&curve.xi[k], &d_eta[k])
            + mp.b_star(&curve.xi[k], &d_xi[k])
            - &lift_h[k];
        report.max_line1 = report.max_line1.max(line1.amax());
        report.max_line2 = report.max_line2.max(line2.amax());
        report.nodes += 1;
    }
    Ok(report)
}

/// Integrate the matched second-order flow together with the ambient group
/// reconstruction, then factorize the path into its `(G, H)` components.
pub fn msoep_curve_with_reconstruction(
    pair: &GroupPair,
    ambient: &MatrixGroup,
    lag: &MatchedSoLagrangian,
    s0: &Coords,
    t_final: f64,
    dt: f64,
) -> Result<MatchedJetCurve, DynamicsError> {
    let mp = pair.tensors.clone();
    let lag2 = lag.clone();
    let out = super::integrate_with_reconstruction(
        ambient,
        move |y: &Coords| super::msoep_field(&mp, &lag2, y),
        0,
        s0,
        &cmat::identity(),
        t_final,
        dt,
        1,
    )?;
    let (ng, nh) = (pair.tensors.g.dim(), pair.tensors.h.dim());
    let mut curve = MatchedJetCurve {
        dt: out.dt,
        g: Vec::new(),
        h: Vec::new(),
        xi: Vec::new(),
        eta: Vec::new(),
        xidot: Some(Vec::new()),
        etadot: Some(Vec::new()),
    };
    for (m, s) in out.path.iter().zip(&out.states) {
        let (g, h) = (pair.factorize)(m).map_err(DynamicsError::Group)?;
        curve.g.push(g);
        curve.h.push(h);
        curve.xi.push(s.rows(0, ng).into_owned());
        curve.eta.push(s.rows(ng, nh).into_owned());
        curve
            .xidot
            .as_mut()
            .unwrap()
            .push(s.rows(ng + nh, ng).into_owned());
        curve
            .etadot
            .as_mut()
            .unwrap()
            .push(s.rows(2 * ng + nh, nh).into_owned());
    }
    Ok(curve)
}

/// Integrate the single-factor second-order flow with reconstruction.
pub fn soep_curve_with_reconstruction(
    grp: &MatrixGroup,
    lag: &SoLagrangian,
    s0: &Coords,
    t_final: f64,
    dt: f64,
) -> Result<JetCurve, DynamicsError> {
    let alg = grp.algebra.clone();
    let lag2 = lag.clone();
    let out = super::integrate_with_reconstruction(
        grp,
        move |y: &Coords| super::soep_field(&alg, &lag2, y),
        0,
        s0,
        &cmat::identity(),
        t_final,
        dt,
        1,
    )?;
    let n = grp.dim();
    Ok(JetCurve {
        dt: out.dt,
        g: out.path,
        xi: out
            .states
            .iter()
            .map(|s| s.rows(0, n).into_owned())
            .collect(),
        xidot: Some(
            out.states
                .iter()
                .map(|s| s.rows(n, n).into_owned())
                .collect(),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{pack3, QuadraticForm};
    use crate::instances;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn left_lift_matches_analytic_derivative() {
        let su2 = instances::su2_group();
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let v = random_matrix_potential(&mut rng);
        let g = su2.random_element(&mut rng);
        // d/ds Re tr(C g exp(s ei)) = Re tr(C g hat(ei))
        let c_probe = |m: &CMat2| v(m);
        let lift = left_lift(&su2, &c_probe, &g, 1e-4);
        for i in 0..3 {
            let want = {
                let h = 1e-6;
                (v(&(g * su2.exp(&(su2.algebra.basis_vec(i) * h))))
                    - v(&(g * su2.exp(&(su2.algebra.basis_vec(i) * -h)))))
                    / (2.0 * h)
            };
            assert!((lift[i] - want).abs() < 1e-7);
        }
    }

    #[test]
    fn residual_identity_on_random_curves() {
        // RsoEL = R1 - dR2/dt pointwise, for arbitrary smooth curves and
        // group-dependent quadratic Lagrangians
        let su2 = instances::su2_group();
        let mut rng = ChaCha8Rng::seed_from_u64(92);
        for _ in 0..5 {
            let curve = random_jet_curve(&su2, &mut rng, 0.0, 0.3, 1e-3);
            let lag = crate::dynamics::SoLagrangian {
                m_xi: random_spd(&mut rng, 3),
                m_xidot: random_spd(&mut rng, 3),
            };
            let v = random_matrix_potential(&mut rng);
            let report = so_el_analysis(&su2, &lag, Some(&v), &curve).unwrap();
            assert!(
                report.max_identity < 1e-5,
                "identity residual {:e} (R1 {:e}, R2 {:e})",
                report.max_identity,
                report.max_r1,
                report.max_r2
            );
            // a random curve does not solve the equations
            assert!(report.max_rsoel > 1e-4);
        }
    }

    #[test]
    fn flat_torus_curves_solve_the_flat_equations() {
        // curves inside a maximal torus keep every bracket term zero, so the
        // residuals reduce to the flat (abelian) Euler-Lagrange system
        let su2 = instances::su2_group();
        let e3 = Coords::from_vec(vec![0.0, 0.0, 1.0]);
        let lag = crate::dynamics::SoLagrangian {
            m_xi: QuadraticForm::identity(3),
            m_xidot: QuadraticForm::identity(3),
        };
        // constant xi: every residual vanishes identically
        let flat = {
            let e3 = e3.clone();
            JetCurve::from_closures(
                |t: f64| su2.exp(&(&e3 * (0.4 * t))),
                |_t: f64| &e3 * 0.4,
                0.0,
                0.2,
                1e-3,
            )
        };
        let report = so_el_analysis(&su2, &lag, None, &flat).unwrap();
        assert!(report.max_r1 < 1e-10 && report.max_r2 < 1e-10 && report.max_rsoel < 1e-10);
        // xi(t) = cosh(t) e3 solves the eliminated flat equation
        // (xi' - xi''' = 0) but not the two-line system: R2 stays finite
        let cosh_curve = {
            let e3 = e3.clone();
            JetCurve::from_closures(
                |t: f64| su2.exp(&(&e3 * t.sinh())),
                |t: f64| &e3 * t.cosh(),
                0.0,
                0.2,
                1e-3,
            )
        };
        let report = so_el_analysis(&su2, &lag, None, &cosh_curve).unwrap();
        // triple-nested grid stencils float on an h^-3 roundoff floor, so the
        // eliminated residual bottoms out near 1e-7 even on exact solutions
        assert!(report.max_rsoel < 1e-5, "RsoEL {:e}", report.max_rsoel);
        assert!(report.max_r2 > 0.5, "R2 {:e}", report.max_r2);
        assert!(report.max_identity < 1e-5);
    }

    #[test]
    fn soep_solutions_kill_rsoel_but_not_r2() {
        let su2 = instances::su2_group();
        let lag = crate::dynamics::SoLagrangian {
            m_xi: QuadraticForm::identity(3),
            m_xidot: QuadraticForm::identity(3),
        };
        let s0 = pack3(
            &Coords::from_vec(vec![0.4, -0.2, 0.3]),
            &Coords::from_vec(vec![0.1, 0.3, -0.5]),
            &Coords::from_vec(vec![-0.2, 0.6, 0.1]),
        );
        let curve = soep_curve_with_reconstruction(&su2, &lag, &s0, 0.3, 1e-3).unwrap();
        let report = so_el_analysis(&su2, &lag, None, &curve).unwrap();
        assert!(report.max_rsoel < 1e-5, "RsoEL {:e}", report.max_rsoel);
        assert!(
            report.max_r2 > 1e-3,
            "R2 should not vanish, got {:e}",
            report.max_r2
        );
        assert!(report.max_identity < 1e-6);
    }

    #[test]
    fn matched_el2_on_msoep_solution() {
        let pair = instances::su2k_group_pair();
        let ambient = instances::sl2c_ambient_group();
        let lag = crate::dynamics::MatchedSoLagrangian::isotropic(3, 3);
        let s0 = Coords::from_vec(vec![
            0.3, -0.1, 0.2, 0.1, 0.2, -0.3, 0.05, 0.1, -0.2, 0.15, -0.05, 0.1, 0.1, -0.3, 0.2,
            -0.1, 0.2, 0.05,
        ]);
        let curve = msoep_curve_with_reconstruction(&pair, &ambient, &lag, &s0, 0.3, 1e-3).unwrap();
        let report = matched_el2_analysis(&pair, &lag, None, &curve).unwrap();
        assert!(report.max_line1 < 1e-5, "line1 {:e}", report.max_line1);
        assert!(report.max_line2 < 1e-5, "line2 {:e}", report.max_line2);
    }

    #[test]
    fn matched_el2_constant_identity_curve_is_flat() {
        let pair = instances::su2k_group_pair();
        let lag = crate::dynamics::MatchedSoLagrangian::isotropic(3, 3);
        let n = 40;
        let curve = MatchedJetCurve {
            dt: 1e-3,
            g: vec![cmat::identity(); n],
            h: vec![cmat::identity(); n],
            xi: vec![Coords::zeros(3); n],
            eta: vec![Coords::zeros(3); n],
            xidot: Some(vec![Coords::zeros(3); n]),
            etadot: Some(vec![Coords::zeros(3); n]),
        };
        let report = matched_el2_analysis(&pair, &lag, None, &curve).unwrap();
        assert_eq!(report.max_line1, 0.0);
        assert_eq!(report.max_line2, 0.0);
        // a constant potential adds exactly nothing
        let flat = |_: &CMat2, _: &CMat2| 2.5;
        let report = matched_el2_analysis(&pair, &lag, Some(&flat), &curve).unwrap();
        assert!(report.max_line1 < 1e-12 && report.max_line2 < 1e-12);
    }
}
