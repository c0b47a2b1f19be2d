//! Fixed-step integration and finite-difference stencils.
//!
//! Everything downstream treats Lie algebra elements and their duals as plain
//! coordinate vectors against a fixed basis, so the whole numerical kernel is
//! expressed on [`Coords`]. All routines are pure and deterministic.

use nalgebra::DVector;
use thiserror::Error;

/// Coordinates of a Lie algebra element (or of a dual element; the pairing is
/// the Euclidean dot product, so both sides share the representation).
pub type Coords = DVector<f64>;

/// Default step for time integration.
pub const DEFAULT_DT: f64 = 1e-3;
/// Default step for finite-difference stencils.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum KernelError {
    /// A Runge-Kutta stage produced a non-finite value.
    #[error("integration diverged at t = {t} (stage {stage})")]
    IntegrationDiverged { t: f64, stage: usize },
    #[error("invalid step: h = {h}")]
    InvalidStep { h: f64 },
    #[error("invalid horizon: t_final = {t_final}")]
    InvalidHorizon { t_final: f64 },
}

pub fn all_finite(v: &Coords) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// One classical fourth-order Runge-Kutta step for `dy/dt = field(t, y)`.
pub fn rk4_step<F>(field: &F, t: f64, y: &Coords, h: f64) -> Result<Coords, KernelError>
where
    F: Fn(f64, &Coords) -> Coords + ?Sized,
{
    if !(h > 0.0) {
        return Err(KernelError::InvalidStep { h });
    }
    let check = |k: &Coords, stage: usize| {
        if all_finite(k) {
            Ok(())
        } else {
            Err(KernelError::IntegrationDiverged { t, stage })
        }
    };
    let k1 = field(t, y);
    check(&k1, 0)?;
    let k2 = field(t + 0.5 * h, &(y + &k1 * (0.5 * h)));
    check(&k2, 1)?;
    let k3 = field(t + 0.5 * h, &(y + &k2 * (0.5 * h)));
    check(&k3, 2)?;
    let k4 = field(t + h, &(y + &k3 * h));
    check(&k4, 3)?;
    Ok(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

/// Fourth-order central difference of a vector-valued sampler,
/// `(-f(t+2h) + 8 f(t+h) - 8 f(t-h) + f(t-2h)) / (12 h)`.
///
/// Exact (to round-off) for polynomials of degree <= 4.
pub fn fd_derivative<F>(sampler: &F, t: f64, h: f64) -> Coords
where
    F: Fn(f64) -> Coords + ?Sized,
{
    (-sampler(t + 2.0 * h) + sampler(t + h) * 8.0 - sampler(t - h) * 8.0 + sampler(t - 2.0 * h))
        / (12.0 * h)
}

/// Same stencil for a scalar sampler.
pub fn fd_derivative_scalar<F>(sampler: &F, t: f64, h: f64) -> f64
where
    F: Fn(f64) -> f64 + ?Sized,
{
    (-sampler(t + 2.0 * h) + 8.0 * sampler(t + h) - 8.0 * sampler(t - h) + sampler(t - 2.0 * h))
        / (12.0 * h)
}

/// Directional derivative of a scalar field along `dir`, with the same
/// fourth-order central stencil.
pub fn fd_directional<F>(scalar_field: &F, x: &Coords, dir: &Coords, h: f64) -> f64
where
    F: Fn(&Coords) -> f64 + ?Sized,
{
    let at = |s: f64| scalar_field(&(x + dir * s));
    (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
}

/// Central stencil on a uniformly sampled grid; `values[k]` is f(t0 + k h).
/// The index must leave two neighbours on each side.
pub fn fd_derivative_grid(values: &[Coords], k: usize, h: f64) -> Coords {
    assert!(k >= 2 && k + 2 < values.len(), "grid stencil out of range");
    (-&values[k + 2] + &values[k + 1] * 8.0 - &values[k - 1] * 8.0 + &values[k - 2]) / (12.0 * h)
}

/// Uniformly sampled orbit of a first-order system.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Grid spacing actually used (the horizon is split into whole steps).
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<Coords>,
}

impl Trajectory {
    pub fn last(&self) -> &Coords {
        self.states.last().expect("trajectory holds at least y0")
    }
}

/// RK4 orbit of `field` from `y0` over `[0, t_final]`.
///
/// The horizon is divided into `round(t_final / h)` equal steps so the final
/// sample lands exactly on `t_final`. Every `stride`-th state is recorded
/// (the initial and final states always are).
pub fn integrate<F>(
    field: &F,
    y0: &Coords,
    t_final: f64,
    h: f64,
    stride: usize,
) -> Result<Trajectory, KernelError>
where
    F: Fn(f64, &Coords) -> Coords + ?Sized,
{
    if !(h > 0.0) {
        return Err(KernelError::InvalidStep { h });
    }
    if !(t_final > 0.0) {
        return Err(KernelError::InvalidHorizon { t_final });
    }
    let steps = ((t_final / h).round() as usize).max(1);
    let dt = t_final / steps as f64;
    let stride = stride.max(1);
    let mut times = Vec::with_capacity(steps / stride + 2);
    let mut states = Vec::with_capacity(steps / stride + 2);
    let mut y = y0.clone();
    times.push(0.0);
    states.push(y.clone());
    for k in 0..steps {
        let t = k as f64 * dt;
        y = rk4_step(field, t, &y, dt)?;
        if (k + 1) % stride == 0 || k + 1 == steps {
            times.push((k + 1) as f64 * dt);
            states.push(y.clone());
        }
    }
    Ok(Trajectory { dt, times, states })
}
