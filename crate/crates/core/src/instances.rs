//! Concrete algebras, groups and matched pairs shipped with the library:
//!
//! * `su2k` - SU(2) paired with the upper-triangular positive-diagonal group
//!   K inside SL(2,C), with su(2) identified with R^3 (cross product bracket)
//!   and the K algebra with R^3_k ([Y1,Y2] = k x (Y1 x Y2), k = (0,0,1)).
//! * `heisenberg` - the 3-dimensional class-2 nilpotent algebra, self-paired
//!   through (the negative of) its adjoint action.
//! * `abelian:<n>` - zero brackets, zero actions; the degenerate baseline.
//!
//! The su(2) basis is the anti-Hermitian half-Pauli one, `e_j = -(i/2) s_j`,
//! so that `[e_1,e_2] = e_3` realizes the cross product. The K basis is then
//! forced by requiring the splitting of the ambient sl(2,C) bracket to give
//! the action `Y |> X = (k.Y) X - (Y.X) k`; with that normalization the
//! complementary action comes out as `Y <| X = Y x X`.

use crate::algebra::{AlgebraError, LieAlgebra, MatchedPair, Tensor3};
use crate::cmat::{c, CMat2};
use crate::groups::{factorize_su2k, GroupPair, MatrixGroup};
use crate::kernel::Coords;
use num_complex::Complex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("matrix is not in the expected algebra (residual {residual:e})")]
    NotInAlgebra { residual: f64 },
    #[error("nilpotency class 2 required (residual {residual:e})")]
    NotClassTwo { residual: f64 },
    #[error("unknown instance name: {0}")]
    UnknownInstance(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

fn zero_tensor(a: usize, i: usize, j: usize) -> Tensor3 {
    vec![vec![vec![0.0; j]; i]; a]
}

/// su(2) with `[e_i, e_j] = eps_ijk e_k`.
pub fn su2_algebra() -> LieAlgebra {
    let mut sc = zero_tensor(3, 3, 3);
    for (i, j, k, v) in [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)] {
        sc[i][j][k] = v;
        sc[j][i][k] = -v;
    }
    LieAlgebra::new(sc, None).expect("su(2) structure constants")
}

/// The K algebra as R^3_k: `[e_1,e_3] = e_1`, `[e_2,e_3] = e_2`, `[e_1,e_2] = 0`,
/// which is `[Y1,Y2] = k x (Y1 x Y2)` in coordinates.
pub fn r3k_algebra() -> LieAlgebra {
    let mut sc = zero_tensor(3, 3, 3);
    for (i, j, k, v) in [(0, 2, 0, 1.0), (1, 2, 1, 1.0)] {
        sc[i][j][k] = v;
        sc[j][i][k] = -v;
    }
    LieAlgebra::new(sc, None).expect("R^3_k structure constants")
}

/// Heisenberg algebra: `[e_1, e_2] = e_3`, everything else zero.
pub fn heisenberg_algebra() -> LieAlgebra {
    let mut sc = zero_tensor(3, 3, 3);
    sc[0][1][2] = 1.0;
    sc[1][0][2] = -1.0;
    LieAlgebra::new(sc, None).expect("Heisenberg structure constants")
}

// ---- hat / vee realizations ------------------------------------------------

/// `su2_hat(x) = -(i/2) (x . sigma)`.
pub fn su2_hat(x: &Coords) -> CMat2 {
    CMat2::new(
        c(0.0, -0.5 * x[2]),
        c(-0.5 * x[1], -0.5 * x[0]),
        c(0.5 * x[1], -0.5 * x[0]),
        c(0.0, 0.5 * x[2]),
    )
}

/// Coordinate extraction inverse to [`su2_hat`]; tolerant of off-algebra noise.
pub fn su2_vee(m: &CMat2) -> Coords {
    Coords::from_vec(vec![
        -2.0 * m[(1, 0)].im,
        2.0 * m[(1, 0)].re,
        -2.0 * m[(0, 0)].im,
    ])
}

/// Strict version of [`su2_vee`]: rejects input that is not anti-Hermitian
/// traceless within `1e-10`.
pub fn su2_vee_checked(m: &CMat2) -> Result<Coords, InstanceError> {
    let back = su2_hat(&su2_vee(m));
    let residual = crate::cmat::frob(&(m - back));
    if residual > 1e-10 {
        return Err(InstanceError::NotInAlgebra { residual });
    }
    Ok(su2_vee(m))
}

/// K-algebra basis: `f_1 = [[0,-1],[0,0]]`, `f_2 = [[0,i],[0,0]]`,
/// `f_3 = diag(-1/2, 1/2)`.
pub fn k_hat(y: &Coords) -> CMat2 {
    CMat2::new(
        c(-0.5 * y[2], 0.0),
        c(-y[0], y[1]),
        c(0.0, 0.0),
        c(0.5 * y[2], 0.0),
    )
}

pub fn k_vee(m: &CMat2) -> Coords {
    Coords::from_vec(vec![-m[(0, 1)].re, m[(0, 1)].im, -2.0 * m[(0, 0)].re])
}

pub fn k_vee_checked(m: &CMat2) -> Result<Coords, InstanceError> {
    let back = k_hat(&k_vee(m));
    let residual = crate::cmat::frob(&(m - back));
    if residual > 1e-10 {
        return Err(InstanceError::NotInAlgebra { residual });
    }
    Ok(k_vee(m))
}

/// Split a traceless complex matrix into its su(2) and K components,
/// `m = su2_hat(x) + k_hat(y)`.
pub fn sl2c_decompose(m: &CMat2) -> (Coords, Coords) {
    let x = Coords::from_vec(vec![
        -2.0 * m[(1, 0)].im,
        2.0 * m[(1, 0)].re,
        -2.0 * m[(0, 0)].im,
    ]);
    let w = m[(0, 1)] + m[(1, 0)].conj();
    let y = Coords::from_vec(vec![-w.re, w.im, -2.0 * m[(0, 0)].re]);
    (x, y)
}

/// Six-dimensional hat for the ambient algebra, blocks `(su(2), K)`.
pub fn sl2c_hat(z: &Coords) -> CMat2 {
    let x = Coords::from_vec(vec![z[0], z[1], z[2]]);
    let y = Coords::from_vec(vec![z[3], z[4], z[5]]);
    su2_hat(&x) + k_hat(&y)
}

pub fn sl2c_vee(m: &CMat2) -> Coords {
    let (x, y) = sl2c_decompose(m);
    Coords::from_vec(vec![x[0], x[1], x[2], y[0], y[1], y[2]])
}

// ---- group descriptors -----------------------------------------------------

fn su2_defect(m: &CMat2) -> f64 {
    let unitary = crate::cmat::frob(&(m.adjoint() * m - CMat2::identity()));
    let det = (crate::cmat::det(m) - Complex::new(1.0, 0.0)).norm();
    unitary + det
}

fn su2_is_member(m: &CMat2, tol: f64) -> bool {
    su2_defect(m) <= 2.0 * tol
}

fn k_defect(m: &CMat2) -> f64 {
    m[(1, 0)].norm()
        + m[(0, 0)].im.abs()
        + m[(1, 1)].im.abs()
        + (crate::cmat::det(m) - Complex::new(1.0, 0.0)).norm()
}

fn k_is_member(m: &CMat2, tol: f64) -> bool {
    k_defect(m) <= 4.0 * tol && m[(0, 0)].re > 0.0 && m[(1, 1)].re > 0.0
}

fn k_project(m: &CMat2) -> CMat2 {
    // zero the lower-left entry, realify the diagonal, renormalize the det
    let a = Complex::new(m[(0, 0)].re.max(1e-300), 0.0);
    CMat2::new(a, m[(0, 1)], Complex::new(0.0, 0.0), 1.0 / a)
}

fn sl2c_defect(m: &CMat2) -> f64 {
    (crate::cmat::det(m) - Complex::new(1.0, 0.0)).norm()
}

fn sl2c_is_member(m: &CMat2, tol: f64) -> bool {
    sl2c_defect(m) <= tol
}

fn sl2c_project(m: &CMat2) -> CMat2 {
    m / crate::cmat::det(m).sqrt()
}

pub fn su2_group() -> MatrixGroup {
    MatrixGroup {
        name: "SU(2)",
        algebra: su2_algebra(),
        hat: su2_hat,
        vee: su2_vee,
        is_member: su2_is_member,
        defect: su2_defect,
        project: crate::cmat::project_su2,
    }
}

pub fn k_group() -> MatrixGroup {
    MatrixGroup {
        name: "K",
        algebra: r3k_algebra(),
        hat: k_hat,
        vee: k_vee,
        is_member: k_is_member,
        defect: k_defect,
        project: k_project,
    }
}

/// Ambient SL(2,C) as a matrix group over the double cross sum algebra.
pub fn sl2c_ambient_group() -> MatrixGroup {
    MatrixGroup {
        name: "SL(2,C)",
        algebra: su2k_matched_pair()
            .dcs_algebra()
            .expect("su2 |><| K closes"),
        hat: sl2c_hat,
        vee: sl2c_vee,
        is_member: sl2c_is_member,
        defect: sl2c_defect,
        project: sl2c_project,
    }
}

// ---- matched pairs ----------------------------------------------------------

/// Default `b*` convention carried by the su2k tensors: the explicit 3D
/// system is printed with the negative transpose.
pub const SU2K_DEFAULT_B_SIGN: f64 = -1.0;

/// Matched pair of Lie algebras obtained by splitting the ambient sl(2,C)
/// bracket over the su(2) (+) K decomposition: the g-component of `[eta, xi]`
/// is `eta |> xi`, the K-component is `eta <| xi`. Derived numerically from
/// the matrix brackets, not copied from any closed form.
pub fn su2k_matched_pair() -> MatchedPair {
    let g = su2_algebra();
    let h = r3k_algebra();
    let mut act_left = zero_tensor(3, 3, 3);
    let mut act_right = zero_tensor(3, 3, 3);
    for a in 0..3 {
        for i in 0..3 {
            let br = crate::cmat::commutator(&k_hat(&h.basis_vec(a)), &su2_hat(&g.basis_vec(i)));
            let (x, y) = sl2c_decompose(&br);
            for j in 0..3 {
                act_left[a][i][j] = x[j];
                act_right[a][i][j] = y[j];
            }
        }
    }
    MatchedPair::new(g, h, act_left, act_right, SU2K_DEFAULT_B_SIGN)
        .expect("su2k tensors are well-shaped")
}

/// The full group-level matched pair `(SU(2), K)` with Iwasawa factorization.
pub fn su2k_group_pair() -> GroupPair {
    GroupPair {
        g: su2_group(),
        h: k_group(),
        tensors: su2k_matched_pair(),
        factorize: factorize_su2k,
        fd_step: 1e-4,
        jet_fd_step: 1e-3,
    }
}

/// Self-pairing of a class-2 nilpotent algebra through its adjoint action:
/// `eta |> xi = -[eta, xi]` and `eta <| xi = [eta, xi]`. For class 2 every
/// compatibility term is a double bracket, so the axioms hold identically;
/// the signs are fixed by the coadjoint-action display on basis pairs.
pub fn nilpotent_selfpair(desc: &LieAlgebra) -> Result<MatchedPair, InstanceError> {
    let residual = desc.class_two_residual();
    if residual > 1e-12 {
        return Err(InstanceError::NotClassTwo { residual });
    }
    let n = desc.dim();
    let sc = desc.structure_constants();
    let mut act_left = zero_tensor(n, n, n);
    let mut act_right = zero_tensor(n, n, n);
    for a in 0..n {
        for i in 0..n {
            for j in 0..n {
                act_left[a][i][j] = -sc[a][i][j];
                act_right[a][i][j] = sc[a][i][j];
            }
        }
    }
    Ok(MatchedPair::new(
        desc.clone(),
        desc.clone(),
        act_left,
        act_right,
        1.0,
    )?)
}

/// Zero tensors over two abelian factors.
pub fn abelian_pair(n: usize) -> MatchedPair {
    MatchedPair::trivial(LieAlgebra::abelian(n), LieAlgebra::abelian(n))
}

/// Residual of the printed self-paired coadjoint display on basis pairs:
/// `ad*_(x,y)(x^b, y^b) = (ad*_x x^b - ad*_y(x^b + y^b), ad*_y y^b + ad*_x(x^b + y^b))`.
pub fn selfpair_coadjoint_residual(pair: &MatchedPair) -> f64 {
    let alg = &pair.g;
    let n = alg.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = alg.basis_vec(i);
            let y = alg.basis_vec(j);
            let mu = alg.flat(&x);
            let nu = alg.flat(&y);
            // generic double-cross-sum coadjoint from the pair tensors
            let gpart = alg.ad_star(&x, &mu) - pair.coact_on_gstar(&mu, &y) - pair.a_star(&y, &nu);
            let hpart = alg.ad_star(&y, &nu) + pair.coact_on_hstar(&x, &nu) + pair.b_star(&x, &mu);
            // printed closed form
            let sum = &mu + &nu;
            let gwant = alg.ad_star(&x, &mu) - alg.ad_star(&y, &sum);
            let hwant = alg.ad_star(&y, &nu) + alg.ad_star(&x, &sum);
            worst = worst
                .max((gpart - gwant).amax())
                .max((hpart - hwant).amax());
        }
    }
    worst
}

/// Instance names addressable from the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceName {
    Su2k,
    Heisenberg,
    Abelian(usize),
}

impl InstanceName {
    pub fn parse(name: &str) -> Result<Self, InstanceError> {
        match name {
            "su2k" => Ok(InstanceName::Su2k),
            "heisenberg" => Ok(InstanceName::Heisenberg),
            other => {
                if let Some(dim) = other.strip_prefix("abelian:") {
                    let dim: usize = dim
                        .parse()
                        .map_err(|_| InstanceError::UnknownInstance(other.to_string()))?;
                    if dim == 0 || dim > 12 {
                        return Err(InstanceError::UnknownInstance(other.to_string()));
                    }
                    Ok(InstanceName::Abelian(dim))
                } else {
                    Err(InstanceError::UnknownInstance(other.to_string()))
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            InstanceName::Su2k => "su2k".into(),
            InstanceName::Heisenberg => "heisenberg".into(),
            InstanceName::Abelian(n) => format!("abelian:{n}"),
        }
    }

    /// The matched pair of algebras this name denotes.
    pub fn matched_pair(&self) -> Result<MatchedPair, InstanceError> {
        match self {
            InstanceName::Su2k => Ok(su2k_matched_pair()),
            InstanceName::Heisenberg => nilpotent_selfpair(&heisenberg_algebra()),
            InstanceName::Abelian(n) => Ok(abelian_pair(*n)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmat::{self, frob};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v3(a: f64, b: f64, x: f64) -> Coords {
        Coords::from_vec(vec![a, b, x])
    }

    #[test]
    fn hat_vee_inverse_pairs() {
        let x = v3(0.3, -1.2, 0.7);
        assert!((su2_vee(&su2_hat(&x)) - &x).amax() < 1e-15);
        assert!((k_vee(&k_hat(&x)) - &x).amax() < 1e-15);
        assert!(frob(&su2_hat(&v3(0.0, 0.0, 0.0))) == 0.0);
        let z = Coords::from_vec(vec![0.1, -0.2, 0.3, 0.4, -0.5, 0.6]);
        assert!((sl2c_vee(&sl2c_hat(&z)) - &z).amax() < 1e-15);
    }

    #[test]
    fn su2_hat_is_bracket_compatible() {
        let alg = su2_algebra();
        for i in 0..3 {
            for j in 0..3 {
                let lhs = su2_hat(&alg.bracket(&alg.basis_vec(i), &alg.basis_vec(j)));
                let rhs =
                    cmat::commutator(&su2_hat(&alg.basis_vec(i)), &su2_hat(&alg.basis_vec(j)));
                assert!(frob(&(lhs - rhs)) < 1e-15);
            }
        }
    }

    #[test]
    fn k_hat_is_bracket_compatible() {
        let alg = r3k_algebra();
        for i in 0..3 {
            for j in 0..3 {
                let lhs = k_hat(&alg.bracket(&alg.basis_vec(i), &alg.basis_vec(j)));
                let rhs = cmat::commutator(&k_hat(&alg.basis_vec(i)), &k_hat(&alg.basis_vec(j)));
                assert!(frob(&(lhs - rhs)) < 1e-15);
            }
        }
    }

    #[test]
    fn vee_checked_rejects_off_algebra_input() {
        let m = CMat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert!(su2_vee_checked(&m).is_err());
        assert!(su2_vee_checked(&su2_hat(&v3(1.0, 2.0, 3.0))).is_ok());
    }

    #[test]
    fn ad_compatibility_induces_rotations() {
        // vee(g hat(x) g^-1) must be an orthogonal transformation of x
        let grp = su2_group();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let g = grp.random_element(&mut rng);
            let m = grp.ad_matrix(&g);
            let err = (m.transpose() * &m - nalgebra::DMatrix::identity(3, 3))
                .abs()
                .max();
            assert!(err < 1e-12);
        }
    }

    #[test]
    fn su2k_tensors_match_their_closed_forms() {
        // Y |> X = (k.Y) X - (Y.X) k  and  Y <| X = Y x X
        let pair = su2k_matched_pair();
        let k = v3(0.0, 0.0, 1.0);
        for a in 0..3 {
            for i in 0..3 {
                let y = pair.h.basis_vec(a);
                let x = pair.g.basis_vec(i);
                let left = pair.act_left(&y, &x);
                let want = &x * k.dot(&y) - &k * y.dot(&x);
                assert!((left - want).amax() < 1e-14);
                let right = pair.act_right(&y, &x);
                let want = v3(
                    y[1] * x[2] - y[2] * x[1],
                    y[2] * x[0] - y[0] * x[2],
                    y[0] * x[1] - y[1] * x[0],
                );
                assert!((right - want).amax() < 1e-14);
            }
        }
        assert_eq!(pair.sign_b_star, SU2K_DEFAULT_B_SIGN);
    }

    #[test]
    fn su2k_ad_star_closed_form_cross_consistency() {
        // the R^3_k structure constants reproduce (k.Y) Psi - (Psi.Y) k
        let alg = r3k_algebra();
        let k = v3(0.0, 0.0, 1.0);
        for a in 0..3 {
            for b in 0..3 {
                let y = alg.basis_vec(a);
                let psi = alg.basis_vec(b);
                let got = alg.ad_star(&y, &psi);
                let want = &psi * k.dot(&y) - &k * psi.dot(&y);
                assert!((got - want).amax() < 1e-14);
            }
        }
    }

    #[test]
    fn heisenberg_selfpair_passes_axioms_and_display() {
        let pair = nilpotent_selfpair(&heisenberg_algebra()).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        let r = pair.matched_axiom_residual(
                            &pair.h.basis_vec(a),
                            &pair.h.basis_vec(b),
                            &pair.g.basis_vec(i),
                            &pair.g.basis_vec(j),
                        );
                        assert!(r < 1e-14);
                    }
                }
            }
        }
        assert!(selfpair_coadjoint_residual(&pair) < 1e-14);
        // the display pins down both signs on basis pairs: flipping either
        // action breaks it
        let mut flipped = pair.clone();
        for t in flipped.act_left.iter_mut().flatten().flatten() {
            *t = -*t;
        }
        assert!(selfpair_coadjoint_residual(&flipped) > 0.5);
    }

    #[test]
    fn selfpair_requires_class_two() {
        assert!(matches!(
            nilpotent_selfpair(&su2_algebra()),
            Err(InstanceError::NotClassTwo { .. })
        ));
        // abelian input degenerates to zero tensors
        let pair = nilpotent_selfpair(&LieAlgebra::abelian(3)).unwrap();
        assert!(pair.left_action_is_zero());
        assert!(selfpair_coadjoint_residual(&pair) == 0.0);
    }

    #[test]
    fn heisenberg_class_two_identity_is_exact() {
        assert_eq!(heisenberg_algebra().class_two_residual(), 0.0);
    }

    #[test]
    fn instance_names_parse() {
        assert_eq!(InstanceName::parse("su2k").unwrap(), InstanceName::Su2k);
        assert_eq!(
            InstanceName::parse("abelian:4").unwrap(),
            InstanceName::Abelian(4)
        );
        assert!(InstanceName::parse("nosuch").is_err());
        assert!(InstanceName::parse("abelian:0").is_err());
        assert_relative_eq!(
            InstanceName::parse("heisenberg")
                .unwrap()
                .matched_pair()
                .unwrap()
                .g
                .dim() as f64,
            3.0
        );
    }

    #[test]
    fn infinitesimal_group_consistency() {
        // for each basis pair, d/ds at 0 of the group action along exp curves
        // equals the tensor action
        let pair = su2k_group_pair();
        for a in 0..3 {
            for i in 0..3 {
                let eta = pair.h.algebra.basis_vec(a);
                let xi = pair.g.algebra.basis_vec(i);
                let got = pair.act_h_on_galg(&pair.h.exp(&(&eta * 1e-5)), &xi);
                // (exp(s eta) |> xi - xi)/s -> eta |> xi
                let got = (got.unwrap() - &xi) / 1e-5;
                let want = pair.tensors.act_left(&eta, &xi);
                assert!((got - want).amax() < 1e-4);
                // eta <| e = eta, so subtract the base point before scaling
                let got = (pair
                    .act_alg_h_by_g(&eta, &pair.g.exp(&(&xi * 1e-5)))
                    .unwrap()
                    - &eta)
                    / 1e-5;
                let want = pair.tensors.act_right(&eta, &xi);
                assert!((got - want).amax() < 1e-4);
            }
        }
    }
}
