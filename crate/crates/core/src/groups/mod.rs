//! Matrix Lie groups and the structures layered on top of them: tangent
//! towers `TG`, `T^2G`, `TTG` with their cocycles and realization maps, and
//! matched pairs of groups with factorization-derived mutual actions.

mod matched;
mod tangent;

pub use matched::*;
pub use tangent::*;

use crate::algebra::LieAlgebra;
use crate::cmat::{self, CMat2};
use crate::kernel::Coords;
use nalgebra::DMatrix;
use rand::Rng;
use thiserror::Error;

/// Membership tolerance for group predicates.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("matrix is not in {group} (residual {residual:e})")]
    NotInGroup { group: &'static str, residual: f64 },
    #[error("factorization failed: {0}")]
    FactorizationFailed(String),
    #[error("group path left the group (membership residual {residual:e})")]
    ReconstructionDrift { residual: f64 },
}

/// A matrix Lie group inside SL(2,C), described by its algebra (structure
/// constants over a fixed basis), the hat/vee maps realizing that basis, and a
/// membership predicate with a projection back onto the group.
#[derive(Clone)]
pub struct MatrixGroup {
    pub name: &'static str,
    pub algebra: LieAlgebra,
    pub hat: fn(&Coords) -> CMat2,
    /// Coordinate extraction; tolerant of small off-algebra noise.
    pub vee: fn(&CMat2) -> Coords,
    pub is_member: fn(&CMat2, f64) -> bool,
    /// Continuous membership defect (0 on the group), used to watch drift.
    pub defect: fn(&CMat2) -> f64,
    pub project: fn(&CMat2) -> CMat2,
}

impl std::fmt::Debug for MatrixGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MatrixGroup")
            .field("name", &self.name)
            .finish()
    }
}

impl MatrixGroup {
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn identity(&self) -> CMat2 {
        cmat::identity()
    }

    pub fn exp(&self, v: &Coords) -> CMat2 {
        cmat::exp_traceless(&(self.hat)(v))
    }

    pub fn check_member(&self, g: &CMat2) -> Result<(), GroupError> {
        if (self.is_member)(g, MEMBERSHIP_TOL) {
            Ok(())
        } else {
            Err(GroupError::NotInGroup {
                group: self.name,
                residual: (self.defect)(g),
            })
        }
    }

    /// `Ad_g xi = vee(g hat(xi) g^-1)`.
    pub fn ad(&self, g: &CMat2, xi: &Coords) -> Coords {
        (self.vee)(&(g * (self.hat)(xi) * cmat::inverse(g)))
    }

    /// Matrix of `Ad_g` in the fixed basis.
    pub fn ad_matrix(&self, g: &CMat2) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            let col = self.ad(g, &self.algebra.basis_vec(i));
            m.column_mut(i).copy_from(&col);
        }
        m
    }

    /// Group coadjoint `Ad*_g mu`, the pairing transpose of `Ad_{g^-1}`.
    pub fn coad(&self, g: &CMat2, mu: &Coords) -> Coords {
        self.ad_matrix(&cmat::inverse(g)).transpose() * mu
    }

    pub fn random_algebra_vec<R: Rng>(&self, rng: &mut R) -> Coords {
        Coords::from_fn(self.dim(), |_, _| rng.gen_range(-1.0..1.0))
    }

    pub fn random_element<R: Rng>(&self, rng: &mut R) -> CMat2 {
        self.exp(&self.random_algebra_vec(rng))
    }
}

#[cfg(test)]
mod tests {
    use crate::cmat::{self, frob};
    use crate::instances;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ad_is_group_action_and_bracket_preserving() {
        let su2 = instances::su2_group();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let g = su2.random_element(&mut rng);
            let gt = su2.random_element(&mut rng);
            let x = su2.random_algebra_vec(&mut rng);
            let y = su2.random_algebra_vec(&mut rng);
            let lhs = su2.ad(&(g * gt), &x);
            let rhs = su2.ad(&g, &su2.ad(&gt, &x));
            assert!((lhs - rhs).amax() < 1e-12);
            // Ad_g is an algebra automorphism
            let lhs = su2.ad(&g, &su2.algebra.bracket(&x, &y));
            let rhs = su2.algebra.bracket(&su2.ad(&g, &x), &su2.ad(&g, &y));
            assert!((lhs - rhs).amax() < 1e-10);
        }
    }

    #[test]
    fn coad_pairs_against_ad() {
        let su2 = instances::su2_group();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = su2.random_element(&mut rng);
            let mu = su2.random_algebra_vec(&mut rng);
            let xi = su2.random_algebra_vec(&mut rng);
            // <Ad*_{g^-1} mu, xi> = <mu, Ad_g xi>
            let lhs = su2.coad(&cmat::inverse(&g), &mu).dot(&xi);
            let rhs = mu.dot(&su2.ad(&g, &xi));
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn membership_and_inverse() {
        let su2 = instances::su2_group();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = su2.random_element(&mut rng);
        su2.check_member(&g).unwrap();
        assert!(frob(&(g * cmat::inverse(&g) - cmat::identity())) < 1e-12);
        let k = instances::k_group();
        let t = k.random_element(&mut rng);
        k.check_member(&t).unwrap();
        assert!(k.check_member(&g).is_err());
    }
}
