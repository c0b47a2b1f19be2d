//! Named, seeded, reportable verification suites.
//!
//! Mathematical failures are data: a failing suite produces a report with
//! `pass = false` and the worst offending input echoed at full precision.
//! Only configuration problems (unknown names, inapplicable instances) are
//! errors. Sample evaluation runs through [`crate::batch`], so reports are
//! identical across thread counts.

use crate::algebra::join_pair;
use crate::batch::{sweep_max, WorstSample};
use crate::cmat;
use crate::dynamics::{
    self, ep_energy, ep_field, matched_el2_analysis, mep_energy, mep_field, msoep_field,
    r3_decoupled_field, r3_explicit_field, r3_final_display_field,
    r3_semidirect_left_trivial_field, r3_semidirect_right_trivial_field, random_jet_curve,
    random_matrix_potential, random_spd, so_el_analysis, soep_field, spline_field, DynamicsError,
    MatchedSoLagrangian, QuadraticForm, SignBranch, SoLagrangian,
};
use crate::groups::{
    self, g_t2g_actions, phi_coboundary_residual, phi_ttg_coboundary_residual, random_t2g,
    random_tg, random_ttg, t2g_dist, t2g_mul, tg_dist, tg_identity, tg_inv, tg_mul, ttg_alt_dist,
    ttg_alt_mul, ttg_assemble, ttg_dist, ttg_from_alt, ttg_identity, ttg_include_alg,
    ttg_include_t2g, ttg_inv, ttg_mul, ttg_split, ttg_to_alt, GroupError, GroupPair, T2gElement,
};
use crate::instances::{self, InstanceError, InstanceName};
use crate::kernel::{self, Coords};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
    #[error("suite {suite} does not apply to instance {instance}")]
    NotApplicable { suite: String, instance: String },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("b* convention unresolved: {0}")]
    ConventionUnresolved(String),
}

/// Outcome of one suite run. `pass` holds exactly when
/// `max_residual <= tolerance`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub instance: String,
    pub samples: u64,
    pub seed: u64,
    pub tolerance: f64,
    pub max_residual: f64,
    pub pass: bool,
    pub worst_input: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<String>,
}

impl SuiteReport {
    fn from_sweep(
        suite: &str,
        instance: &InstanceName,
        samples: u64,
        seed: u64,
        tolerance: f64,
        worst: WorstSample,
    ) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            instance: instance.label(),
            samples,
            seed,
            tolerance,
            max_residual: worst.residual,
            pass: worst.residual <= tolerance,
            worst_input: worst.echo,
            details: None,
        }
    }

    fn with_details(mut self, details: String) -> Self {
        self.details = Some(details);
        self
    }
}

fn coords_json(v: &Coords) -> serde_json::Value {
    serde_json::json!(v.as_slice())
}

fn random_coords<R: Rng>(rng: &mut R, dim: usize) -> Coords {
    Coords::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0))
}

/// Suite catalogue: `(name, default samples, default tolerance)`.
pub const SUITES: &[(&str, u64, f64)] = &[
    ("algebra_axioms", 1000, 1e-12),
    ("group_axioms", 1000, 1e-10),
    ("group_tangent_laws", 1000, 1e-10),
    ("jet_composition", 100, 1e-6),
    ("cocycles", 1000, 1e-10),
    ("realization_mult", 1000, 1e-10),
    ("realization_roundtrip", 1000, 1e-14),
    ("ttg_roundtrip", 1000, 1e-14),
    ("ttg_action_identity", 1000, 1e-12),
    ("t2_actions_crosscheck", 200, 1e-6),
    ("residual_identity", 50, 1e-5),
    ("field_equivalence", 100, 1e-12),
    ("degeneration_coherence", 100, 1e-14),
    ("spline_baseline", 50, 1e-12),
    ("selfpair_coadjoint", 1, 1e-12),
    ("conservation_momentum", 1, 1e-6),
    ("convergence_order", 1, 2.0),
    ("so_el_consistency", 5, 1e-5),
    ("el2_consistency", 3, 1e-5),
    ("r3_transcription", 100, 1e-12),
];

/// Whether a suite is defined for an instance.
pub fn suite_applies(suite: &str, instance: &InstanceName) -> bool {
    let su2k_only = matches!(
        suite,
        "group_axioms"
            | "group_tangent_laws"
            | "jet_composition"
            | "cocycles"
            | "realization_mult"
            | "realization_roundtrip"
            | "ttg_roundtrip"
            | "ttg_action_identity"
            | "t2_actions_crosscheck"
            | "residual_identity"
            | "field_equivalence"
            | "degeneration_coherence"
            | "conservation_momentum"
            | "convergence_order"
            | "so_el_consistency"
            | "el2_consistency"
            | "r3_transcription"
    );
    match suite {
        "algebra_axioms" | "spline_baseline" => true,
        "selfpair_coadjoint" => {
            matches!(
                instance,
                InstanceName::Heisenberg | InstanceName::Abelian(_)
            )
        }
        _ if su2k_only => matches!(instance, InstanceName::Su2k),
        _ => false,
    }
}

/// The default suite set for `--suite all`. The transcription probe is not
/// part of it: it intentionally fails (it quantifies an inconsistency between
/// two displayed forms of the same system) and is run explicitly instead.
pub fn all_suites_for(instance: &InstanceName) -> Vec<&'static str> {
    SUITES
        .iter()
        .map(|(name, _, _)| *name)
        .filter(|name| *name != "r3_transcription" && suite_applies(name, instance))
        .collect()
}

pub fn suite_defaults(name: &str) -> Option<(u64, f64)> {
    SUITES
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, s, t)| (*s, *t))
}

/// Run one named suite.
pub fn run_suite(
    name: &str,
    instance: &InstanceName,
    samples: Option<u64>,
    seed: u64,
    tol: Option<f64>,
) -> Result<SuiteReport, VerifyError> {
    let (default_samples, default_tol) =
        suite_defaults(name).ok_or_else(|| VerifyError::UnknownSuite(name.to_string()))?;
    if !suite_applies(name, instance) {
        return Err(VerifyError::NotApplicable {
            suite: name.to_string(),
            instance: instance.label(),
        });
    }
    let samples = samples.unwrap_or(default_samples);
    let tol = tol.unwrap_or(default_tol);
    match name {
        "algebra_axioms" => algebra_axioms(instance, samples, seed, tol),
        "group_axioms" => group_axioms(instance, samples, seed, tol),
        "group_tangent_laws" => group_tangent_laws(instance, samples, seed, tol),
        "jet_composition" => jet_composition(instance, samples, seed, tol),
        "cocycles" => cocycles(instance, samples, seed, tol),
        "realization_mult" => realization_mult(instance, samples, seed, tol),
        "realization_roundtrip" => realization_roundtrip(instance, samples, seed, tol),
        "ttg_roundtrip" => ttg_roundtrip(instance, samples, seed, tol),
        "ttg_action_identity" => ttg_action_identity(instance, samples, seed, tol),
        "t2_actions_crosscheck" => t2_actions_crosscheck(instance, samples, seed, tol),
        "residual_identity" => residual_identity(instance, samples, seed, tol),
        "field_equivalence" => field_equivalence(instance, samples, seed, tol, None),
        "degeneration_coherence" => degeneration_coherence(instance, samples, seed, tol),
        "spline_baseline" => spline_baseline(instance, samples, seed, tol),
        "selfpair_coadjoint" => selfpair_coadjoint(instance, samples, seed, tol),
        "conservation_momentum" => conservation_momentum(instance, samples, seed, tol),
        "convergence_order" => convergence_order(instance, samples, seed, tol),
        "so_el_consistency" => so_el_consistency(instance, samples, seed, tol),
        "el2_consistency" => el2_consistency(instance, samples, seed, tol),
        "r3_transcription" => r3_transcription(instance, samples, seed, tol),
        _ => Err(VerifyError::UnknownSuite(name.to_string())),
    }
}

/// Run every suite in the default set for the instance.
pub fn run_all(
    instance: &InstanceName,
    samples: Option<u64>,
    seed: u64,
    tol: Option<f64>,
) -> Result<Vec<SuiteReport>, VerifyError> {
    all_suites_for(instance)
        .into_iter()
        .map(|name| run_suite(name, instance, samples, seed, tol))
        .collect()
}

// ---- individual suites ---------------------------------------------------------

fn algebra_axioms(
    instance: &InstanceName,
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SuiteReport, VerifyError> {
    let pair = instance.matched_pair()?;
    let (ng, nh) = (pair.g.dim(), pair.h.dim());
    let worst = sweep_max(samples, seed, |rng| {
        let eta = random_coords(rng, nh);
        let eta2 = random_coords(rng, nh);
        let xi = random_coords(rng, ng);
        let xi2 = random_coords(rng, ng);
        let axioms = pair.matched_axiom_residual(&eta, &eta2, &xi, &xi2);
        let u = join_pair(&random_coords(rng, ng), &random_coords(rng, nh));
        let v = join_pair(&random_coords(rng, ng), &random_coords(rng, nh));
        let w = join_pair(&random_coords(rng, ng), &random_coords(rng, nh));
        let jacobi = pair.dcs_jacobi_residual(&u, &v, &w);
        (
            axioms.max(jacobi),
            serde_json::json!({
                "eta": coords_json(&eta), "eta2": coords_json(&eta2),
                "xi": coords_json(&xi), "xi2": coords_json(&xi2),
                "axioms": axioms, "dcs_jacobi": jacobi,
            }),
        )
    });
    Ok(SuiteReport::from_sweep(
        "algebra_axioms",
        instance,
        samples,
        seed,
        tol,
        worst,
    ))
}

fn su2k_pair_or_err(instance: &InstanceName) -> Result<GroupPair, VerifyError> {
    match instance {
        InstanceName::Su2k => Ok(instances::su2k_group_pair()),
        other => Err(VerifyError::NotApplicable {
            suite: "(su2k-only)".into(),
            instance: other.label(),
        }),
    }
}

fn group_axioms(
    instance: &InstanceName,
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SuiteReport, VerifyError> {
    let pair = su2k_pair_or_err(instance)?;
    let worst = sweep_max(samples, seed, |rng| {
        let p = (pair.g.random_element(rng), pair.h.random_element(rng));
        let q = (pair.g.random_element(rng), pair.h.random_element(rng));
        let r = (pair.g.random_element(rng), pair.h.random_element(rng));
        let res = (|| -> Result<f64, GroupError> {
            let mut worst: f64 = 0.0;
            // associativity against the ambient product
            let pq = pair.dcp_mul(&p, &q)?;
            let lhs = pair.dcp_mul(&pq, &r)?;
            let rhs = pair.dcp_mul(&p, &pair.dcp_mul(&q, &r)?)?;
            worst = worst
                .max(cmat::frob(&(lhs.0 - rhs.0)))
                .max(cmat::frob(&(lhs.1 - rhs.1)));
            let ambient = (p.0 * p.1) * (q.0 * q.1);
            worst = worst.max(cmat::frob(&(pq.0 * pq.1 - ambient)));
            // inverse
            let inv = pair.dcp_inv(&p)?;
            let e = pair.dcp_mul(&p, &inv)?;
            worst = worst
                .max(cmat::frob(&(e.0 - cmat::identity())))
                .max(cmat::frob(&(e.1 - cmat::identity())));
            // the two compatibility identities + reassembly
            worst = worst.max(pair.compatibility_residual(&p.1, &q.1, &p.0, &q.0)?);
            Ok(worst)
        })()
        .unwrap_or(f64::INFINITY);
        (
            res,
            serde_json::json!({
                "g": cmat::to_json(&p.0), "h": cmat::to_json(&p.1),
                "g2": cmat::to_json(&q.0), "h2": cmat::to_json(&q.1),
            }),
        )
    });
    Ok(SuiteReport::from_sweep(
        "group_axioms",
        instance,
        samples,
        seed,
        tol,
        worst,
    ))
}

fn group_tangent_laws(
    instance: &InstanceName,
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SuiteReport, VerifyError> {
    su2k_pair_or_err(instance)?;
    let su2 = instances::su2_group();
    let worst = sweep_max(samples, seed, |rng| {
        let mut worst: f64 = 0.0;
        // TG
        let p = random_tg(&su2, rng);
        let q = random_tg(&su2, rng);
        let r = random_tg(&su2, rng);
        let lhs = tg_mul(&su2, &tg_mul(&su2, &p, &q), &r);
        let rhs = tg_mul(&su2, &p, &tg_mul(&su2, &q, &r));
        worst = worst.max(tg_dist(&lhs, &rhs));
        worst = worst.max(tg_dist(
            &tg_mul(&su2, &p, &tg_inv(&su2, &p)),
            &tg_identity(&su2),
        ));
        // T2G + projection consistency
        let p2 = random_t2g(&su2, rng);
        let q2 = random_t2g(&su2, rng);
        let r2 = random_t2g(&su2, rng);
        let lhs = t2g_mul(&su2, &t2g_mul(&su2, &p2, &q2), &r2);
        let rhs = t2g_mul(&su2, &p2, &t2g_mul(&su2, &q2, &r2));
        worst = worst.max(t2g_dist(&lhs, &rhs));
        let prod = t2g_mul(&su2, &p2, &q2);
        let proj = tg_mul(
            &su2,
            &groups::TgElement {
                g: p2.g,
                xi: p2.xi.clone(),
            },
            &groups::TgElement {
                g: q2.g,
                xi: q2.xi.clone(),
            },
        );
        worst = worst.max((&prod.xi - &proj.xi).amax());
        // TTG + projection to TG on the (g, xi1) slots
        let p3 = random_ttg(&su2, rng);
        let q3 = random_ttg(&su2, rng);
        let r3 = random_ttg(&su2, rng);
        let lhs = ttg_mul(&su2, &ttg_mul(&su2, &p3, &q3), &r3);
        let rhs = ttg_mul(&su2, &p3, &ttg_mul(&su2, &q3, &r3));
        worst = worst.max(ttg_dist(&lhs, &rhs));
        worst = worst.max(ttg_dist(
            &ttg_mul(&su2, &p3, &ttg_inv(&su2, &p3)),
            &ttg_identity(&su2),
        ));
        let prod = ttg_mul(&su2, &p3, &q3);
        let proj = tg_mul(
            &su2,
            &groups::TgElement {
                g: p3.g,
                xi: p3.xi1.clone(),
            },
            &groups::TgElement {
                g: q3.g,
                xi: q3.xi1.clone(),
            },
        );
        worst = worst.max((&prod.xi1 - &proj.xi).amax());
        // the alternative TTG realization is a group law in its own right
        let (pa, qa, ra) = (ttg_to_alt(&su2, &p3), ttg_to_alt(&su2, &q3), ttg_to_alt(&su2, &r3));
        let lhs = ttg_alt_mul(&su2, &ttg_alt_mul(&su2, &pa, &qa), &ra);
        let rhs = ttg_alt_mul(&su2, &pa, &ttg_alt_mul(&su2, &qa, &ra));
        worst = worst.max(ttg_alt_dist(&lhs, &rhs));
        worst = worst.max(ttg_alt_dist(
            &ttg_alt_mul(&su2, &groups::ttg_alt_identity(&su2), &pa),
            &pa,
        ));
        // Ad is a group action
        let x = su2.random_algebra_vec(rng);
        let lhs = su2.ad(&(p.g * q.g), &x);
        let rhs = su2.ad(&p.g, &su2.ad(&q.g, &x));
        worst = worst.max((lhs - rhs).amax());
        (
            worst,
            serde_json::json!({
                "g": cmat::to_json(&p.g), "xi": coords_json(&p.xi),
                "g2": cmat::to_json(&q.g),
            }),
        )
    });
    Ok(SuiteReport::from_sweep(
        "group_tangent_laws",
        instance,
        samples,
        seed,
        tol,
        worst,
    ))
}

fn jet_composition(
    instance: &InstanceName,
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SuiteReport, VerifyError> {
    su2k_pair_or_err(instance)?;
    let su2 = instances::su2_group();
    let worst = sweep_max(samples, seed, |rng| {
        let p = random_t2g(&su2, rng);
        let q = random_t2g(&su2, rng);
        let law = t2g_mul(&su2, &p, &q);
        let oracle = groups::jet2_multiply_oracle(&su2, &p, &q, 1e-4, 1e-3);
        (
            t2g_dist(&law, &oracle),
            serde_json::json!({
                "g": cmat::to_json(&p.g), "xi": coords_json(&p.xi), "xidot": coords_json(&p.xidot),
                "g2": cmat::to_json(&q.g), "xi2": coords_json(&q.xi), "xidot2": coords_json(&q.xidot),
            }),
        )
    });
    Ok(SuiteReport::from_sweep(
        "jet_composition",
        instance,
        samples,
        seed,
        tol,
        worst,
    ))
}

fn cocycles(
    instance: &InstanceName,
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SuiteReport, VerifyError> {
    su2k_pair_or_err(instance)?;
    let su2 = instances::su2_group();
    let worst = sweep_max(samples, seed, |rng| {
        let p = random_tg(&su2, rng);
        let q = random_tg(&su2, rng);
        let r = random_tg(&su2, rng);
        let dphi = phi_coboundary_residual(&su2, &p, &q, &r);
        let gs: Vec<_> = (0..3).map(|_| su2.random_element(rng)).collect();
        let vs: Vec<_> = (0..6).map(|_| su2.random_algebra_vec(rng)).collect();
        let dphi_ttg = phi_ttg_coboundary_residual(
            &su2,
            (&gs[0], &vs[0], &vs[1]),
            (&gs[1], &vs[2], &vs[3]),
            (&gs[2], &vs[4], &vs[5]),
        );
        let us: Vec<_> = (0..6).map(|_| su2.random_algebra_vec(rng)).collect();
        let dchi = groups::chi_coboundary_residual(
            &su2,
            (&us[0], &us[1]),
            (&us[2], &us[3]),
            (&us[4], &us[5]),
        );
        (
            dphi.max(dphi_ttg).max(dchi),
            serde_json::json!({
                "dphi": dphi, "dphi_ttg": dphi_ttg, "dchi": dchi,
                "g": cmat::to_json(&p.g), "xi": coords_json(&p.xi),
            }),
        )
    });
    Ok(SuiteReport::from_sweep(
        "cocycles", instance, samples, seed, tol, worst,
    ))
}

fn realization_mult(
    instance: &InstanceName,
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SuiteReport, VerifyError> {
    su2k_pair_or_err(instance)?;
    let su2 = instances::su2_group();
    let worst = sweep_max(samples, seed, |rng| {
        let p = random_ttg(&su2, rng);
        let q = random_ttg(&su2, rng);
        let lhs = ttg_to_alt(&su2, &ttg_mul(&su2, &p, &q));
        let rhs = ttg_alt_mul(&su2, &ttg_to_alt(&su2, &p), &ttg_to_alt(&su2, &q));
        let fwd = ttg_alt_dist(&lhs, &rhs);
        let pa = ttg_to_alt(&su2, &p);
        let qa = ttg_to_alt(&su2, &q);
        let lhs = ttg_from_alt(&su2, &ttg_alt_mul(&su2, &pa, &qa));
        let rhs = ttg_mul(&su2, &ttg_from_alt(&su2, &pa), &ttg_from_alt(&su2, &qa));
        let bwd = ttg_dist(&lhs, &rhs);
        (
            fwd.max(bwd),
            serde_json::json!({
                "g": cmat::to_json(&p.g),
                "xi1": coords_json(&p.xi1), "xi2": coords_json(&p.xi2), "xi3": coords_json(&p.xi3),
            }),
        )
    });
    Ok(SuiteReport::from_sweep(
        "realization_mult",
        instance,
        samples,
        seed,
        tol,
        worst,
    ))
}

fn realization_roundtrip(
    instance: &InstanceName,
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SuiteReport, VerifyError> {
    su2k_pair_or_err(instance)?;
    let su2 = instances::su2_group();
    let worst = sweep_max(samples, seed, |rng| {
        let p = random_ttg(&su2, rng);
        let there = ttg_dist(&ttg_from_alt(&su2, &ttg_to_alt(&su2, &p)), &p);
        let pa = ttg_to_alt(&su2, &p);
        let back = ttg_alt_dist(&ttg_to_alt(&su2, &ttg_from_alt(&su2, &pa)), &pa);
        (
            there.max(back),
            serde_json::json!({ "xi1": coords_json(&p.xi1), "xi2": coords_json(&p.xi2) }),
        )
    });
    Ok(SuiteReport::from_sweep(
        "realization_roundtrip",
        instance,
        samples,
        seed,
        tol,
        worst,
    ))
}

fn ttg_roundtrip(
    instance: &InstanceName,
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SuiteReport, VerifyError> {
    su2k_pair_or_err(instance)?;
    let su2 = instances::su2_group();
    let worst = sweep_max(samples, seed, |rng| {
        let p = random_ttg(&su2, rng);
        let (xi_tilde, jet) = ttg_split(&su2, &p);
        let assembled = ttg_assemble(&su2, &xi_tilde, &jet);
        let there = ttg_dist(&assembled, &p);
        // and the other composition order
        let xi2 = su2.random_algebra_vec(rng);
        let jet2 = random_t2g(&su2, rng);
        let (xi_back, jet_back) = ttg_split(&su2, &ttg_assemble(&su2, &xi2, &jet2));
        let back = (xi_back - &xi2).amax().max(t2g_dist(&jet_back, &jet2));
        (
            there.max(back),
            serde_json::json!({ "xi1": coords_json(&p.xi1), "xi_tilde": coords_json(&xi_tilde) }),
        )
    });
    Ok(SuiteReport::from_sweep(
        "ttg_roundtrip",
        instance,
        samples,
        seed,
        tol,
        worst,
    ))
}

fn ttg_action_identity(
    instance: &InstanceName,
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SuiteReport, VerifyError> {
    su2k_pair_or_err(instance)?;
    let su2 = instances::su2_group();
    let worst = sweep_max(samples, seed, |rng| {
        let jet = random_t2g(&su2, rng);
        let xi_tilde = su2.random_algebra_vec(rng);
        let (left, right) = g_t2g_actions(&su2, &jet, &xi_tilde);
        let lhs = ttg_mul(
            &su2,
            &ttg_include_t2g(&jet),
            &ttg_include_alg(&su2, &xi_tilde),
        );
        let rhs = ttg_mul(
            &su2,
            &ttg_include_alg(&su2, &left),
            &ttg_include_t2g(&right),
        );
        (
            ttg_dist(&lhs, &rhs),
            serde_json::json!({
                "g": cmat::to_json(&jet.g), "xi": coords_json(&jet.xi),
                "xidot": coords_json(&jet.xidot), "xi_tilde": coords_json(&xi_tilde),
            }),
        )
    });
    Ok(SuiteReport::from_sweep(
        "ttg_action_identity",
        instance,
        samples,
        seed,
        tol,
        worst,
    ))
}

fn t2_actions_crosscheck(
    instance: &InstanceName,
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SuiteReport, VerifyError> {
    let pair = su2k_pair_or_err(instance)?;
    let worst = sweep_max(samples, seed, |rng| {
        let hjet = T2gElement {
            g: pair.h.random_element(rng),
            xi: pair.h.random_algebra_vec(rng),
            xidot: pair.h.random_algebra_vec(rng),
        };
        let gjet = random_t2g(&pair.g, rng);
        let res = (|| -> Result<f64, GroupError> {
            let (l1, r1) = pair.t2_actions_closed_form(&hjet, &gjet)?;
            let (l2, r2) = pair.t2_actions_factorized(&hjet, &gjet)?;
            Ok(t2g_dist(&l1, &l2).max(t2g_dist(&r1, &r2)))
        })()
        .unwrap_or(f64::INFINITY);
        (
            res,
            serde_json::json!({
                "h": cmat::to_json(&hjet.g), "eta": coords_json(&hjet.xi), "etadot": coords_json(&hjet.xidot),
                "g": cmat::to_json(&gjet.g), "xi": coords_json(&gjet.xi), "xidot": coords_json(&gjet.xidot),
            }),
        )
    });
    Ok(SuiteReport::from_sweep(
        "t2_actions_crosscheck",
        instance,
        samples,
        seed,
        tol,
        worst,
    ))
}

fn residual_identity(
    instance: &InstanceName,
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SuiteReport, VerifyError> {
    su2k_pair_or_err(instance)?;
    let su2 = instances::su2_group();
    let worst = sweep_max(samples, seed, |rng| {
        let curve = random_jet_curve(&su2, rng, 0.0, 0.25, 1e-3);
        let lag = SoLagrangian {
            m_xi: random_spd(rng, 3),
            m_xidot: random_spd(rng, 3),
        };
        let v = random_matrix_potential(rng);
        let res = so_el_analysis(&su2, &lag, Some(&v), &curve)
            .map(|r| r.max_identity)
            .unwrap_or(f64::INFINITY);
        (
            res,
            serde_json::json!({
                "m_xi": lag.m_xi.matrix().as_slice(),
                "m_xidot": lag.m_xidot.matrix().as_slice(),
            }),
        )
    });
    Ok(SuiteReport::from_sweep(
        "residual_identity",
        instance,
        samples,
        seed,
        tol,
        worst,
    ))
}

/// Generic matched second-order field against the hand-coded explicit 3D
/// system, under the pair's stored (or an explicit) `b*` sign convention.
fn field_equivalence(
    instance: &InstanceName,
    samples: u64,
    seed: u64,
    tol: f64,
    sign_override: Option<f64>,
) -> Result<SuiteReport, VerifyError> {
    su2k_pair_or_err(instance)?;
    let mut pair = instances::su2k_matched_pair();
    if let Some(sign) = sign_override {
        pair = pair.with_sign(sign);
    }
    let lag = MatchedSoLagrangian::isotropic(3, 3);
    let worst = sweep_max(samples, seed, |rng| {
        let s = random_coords(rng, 18);
        let generic = msoep_field(&pair, &lag, &s);
        let explicit = r3_explicit_field(&s);
        (
            (generic - explicit).amax(),
            serde_json::json!({ "state": coords_json(&s) }),
        )
    });
    let sign = sign_override.unwrap_or(pair.sign_b_star);
    Ok(
        SuiteReport::from_sweep("field_equivalence", instance, samples, seed, tol, worst)
            .with_details(format!("sign_b_star = {sign:+}")),
    )
}

fn degeneration_coherence(
    instance: &InstanceName,
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SuiteReport, VerifyError> {
    su2k_pair_or_err(instance)?;
    let pair = instances::su2k_matched_pair();
    let lag = MatchedSoLagrangian::isotropic(3, 3);
    let worst = sweep_max(samples, seed, |rng| {
        let s = random_coords(rng, 18);
        let r_sd1 = (msoep_field(&pair.zero_right_action(), &lag, &s)
            - r3_semidirect_right_trivial_field(&s))
        .amax();
        let r_sd2 = (msoep_field(&pair.zero_left_action(), &lag, &s)
            - r3_semidirect_left_trivial_field(&s))
        .amax();
        let r_dec = (msoep_field(&pair.zero_left_action().zero_right_action(), &lag, &s)
            - r3_decoupled_field(&s))
        .amax();
        (
            r_sd1.max(r_sd2).max(r_dec),
            serde_json::json!({ "state": coords_json(&s), "sd1": r_sd1, "sd2": r_sd2, "decoupled": r_dec }),
        )
    });
    Ok(SuiteReport::from_sweep(
        "degeneration_coherence",
        instance,
        samples,
        seed,
        tol,
        worst,
    ))
}

fn spline_baseline(
    instance: &InstanceName,
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SuiteReport, VerifyError> {
    match instance {
        InstanceName::Abelian(n) => {
            let dim = *n;
            let alg = crate::algebra::LieAlgebra::abelian(dim);
            let worst = sweep_max(samples, seed, |rng| {
                // all brackets vanish: the jet components follow their free
                // polynomials and the base curve is the cubic they integrate to
                let xi0 = random_coords(rng, dim);
                let xid0 = random_coords(rng, dim);
                let xidd0 = random_coords(rng, dim);
                let xit0 = random_coords(rng, dim);
                let state0 = dynamics::pack6([
                    &xi0,
                    &xit0,
                    &xid0,
                    &Coords::zeros(dim),
                    &xidd0,
                    &Coords::zeros(dim),
                ]);
                // augment with the base-curve coordinates x' = xi
                let mut y0 = Coords::zeros(dim + 6 * dim);
                y0.rows_mut(dim, 6 * dim).copy_from(&state0);
                let alg2 = alg.clone();
                let traj = kernel::integrate(
                    &move |_t: f64, y: &Coords| {
                        let state = y.rows(dim, 6 * dim).into_owned();
                        let ds = spline_field(&alg2, SignBranch::Upper, &state);
                        let mut out = Coords::zeros(dim + 6 * dim);
                        out.rows_mut(0, dim).copy_from(&y.rows(dim, dim)); // x' = xi
                        out.rows_mut(dim, 6 * dim).copy_from(&ds);
                        out
                    },
                    &y0,
                    1.0,
                    1e-2,
                    10,
                )
                .expect("abelian spline integrates");
                let last = traj.last();
                let x = last.rows(0, dim).into_owned();
                let xi = last.rows(dim, dim).into_owned();
                // analytic: xi quadratic jet polynomial, x its cubic integral
                let t = 1.0;
                let want_xi = &xi0 + &xid0 * t + &xidd0 * (0.5 * t * t);
                let want_x = &xi0 * t + &xid0 * (0.5 * t * t) + &xidd0 * (t * t * t / 6.0);
                let res = (xi - want_xi).amax().max((x - want_x).amax());
                (
                    res,
                    serde_json::json!({ "xi0": coords_json(&xi0), "xid0": coords_json(&xid0) }),
                )
            });
            Ok(SuiteReport::from_sweep(
                "spline_baseline",
                instance,
                samples,
                seed,
                tol,
                worst,
            ))
        }
        InstanceName::Heisenberg => {
            let alg = instances::heisenberg_algebra();
            let worst = sweep_max(samples, seed, |rng| {
                // equal components: the coupling brackets cancel in the sum of
                // the two lines, leaving only the self brackets
                let xi = random_coords(rng, 3);
                let xidd = random_coords(rng, 3);
                let s =
                    dynamics::pack6([&xi, &xi, &Coords::zeros(3), &Coords::zeros(3), &xidd, &xidd]);
                let mut res: f64 = 0.0;
                for (branch, sgn) in [(SignBranch::Upper, 1.0), (SignBranch::Lower, -1.0)] {
                    let out = spline_field(&alg, branch, &s);
                    let [_, _, _, _, a, b] = dynamics::unpack6(&out, 3, 3);
                    let want = alg.bracket(&xi, &xidd) * sgn;
                    res = res.max((a + b - &want * 2.0).amax());
                }
                (
                    res,
                    serde_json::json!({ "xi": coords_json(&xi), "xidd": coords_json(&xidd) }),
                )
            });
            Ok(SuiteReport::from_sweep(
                "spline_baseline",
                instance,
                samples,
                seed,
                tol,
                worst,
            ))
        }
        InstanceName::Su2k => {
            // single-factor second-order flow with the acceleration Lagrangian
            // commutes with simultaneous rotation of all jet slots
            let su2 = instances::su2_group();
            let alg = instances::su2_algebra();
            let lag = SoLagrangian::acceleration_only(3);
            let worst = sweep_max(samples, seed, |rng| {
                let s = random_coords(rng, 9);
                let rot = su2.ad_matrix(&su2.random_element(rng));
                let (a, b, c) = dynamics::unpack3(&s);
                let rotated = dynamics::pack3(&(&rot * a), &(&rot * b), &(&rot * c));
                let lhs = soep_field(&alg, &lag, &rotated);
                let (fa, fb, fc) = dynamics::unpack3(&soep_field(&alg, &lag, &s));
                let rhs = dynamics::pack3(&(&rot * fa), &(&rot * fb), &(&rot * fc));
                (
                    (lhs - rhs).amax(),
                    serde_json::json!({ "state": coords_json(&s) }),
                )
            });
            Ok(
                SuiteReport::from_sweep("spline_baseline", instance, samples, seed, tol, worst)
                    .with_details(
                        "rotation equivariance of the isotropic second-order flow".into(),
                    ),
            )
        }
    }
}

fn selfpair_coadjoint(
    instance: &InstanceName,
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SuiteReport, VerifyError> {
    let pair = instance.matched_pair()?;
    let residual = instances::selfpair_coadjoint_residual(&pair);
    Ok(SuiteReport {
        suite: "selfpair_coadjoint".into(),
        instance: instance.label(),
        samples,
        seed,
        tolerance: tol,
        max_residual: residual,
        pass: residual <= tol,
        worst_input: serde_json::json!({ "basis_pairs": pair.g.dim() * pair.g.dim() }),
        details: Some("coadjoint display checked on all basis pairs".into()),
    })
}

fn conservation_momentum(
    instance: &InstanceName,
    _samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SuiteReport, VerifyError> {
    su2k_pair_or_err(instance)?;
    let su2 = instances::su2_group();
    let alg = instances::su2_algebra();
    let body = QuadraticForm::diagonal(&[1.0, 2.0, 3.0]).map_err(VerifyError::Dynamics)?;
    let xi0 = Coords::from_vec(vec![0.3, -0.2, 0.5]);
    let form = body.clone();
    let out = dynamics::integrate_with_reconstruction(
        &su2,
        move |y: &Coords| ep_field(&alg, &form, y),
        0,
        &xi0,
        &cmat::identity(),
        10.0,
        1e-3,
        20,
    )
    .map_err(VerifyError::Dynamics)?;
    let mu0 = body.apply(&out.states[0]);
    let pi_fwd0 = su2.coad(&out.path[0], &mu0);
    let pi_bwd0 = su2.coad(&cmat::inverse(&out.path[0]), &mu0);
    let mut dev_fwd: f64 = 0.0;
    let mut dev_bwd: f64 = 0.0;
    for (g, s) in out.path.iter().zip(&out.states) {
        let mu = body.apply(s);
        dev_fwd = dev_fwd.max((su2.coad(g, &mu) - &pi_fwd0).amax());
        dev_bwd = dev_bwd.max((su2.coad(&cmat::inverse(g), &mu) - &pi_bwd0).amax());
    }
    let (residual, convention) = if dev_fwd <= dev_bwd {
        (dev_fwd, "Ad*_{g(t)}")
    } else {
        (dev_bwd, "Ad*_{g(t)^-1}")
    };
    let exactly_one = (dev_fwd <= tol) ^ (dev_bwd <= tol);
    Ok(SuiteReport {
        suite: "conservation_momentum".into(),
        instance: instance.label(),
        samples: 1,
        seed,
        tolerance: tol,
        max_residual: residual,
        pass: residual <= tol && exactly_one,
        worst_input: serde_json::json!({ "xi0": coords_json(&xi0), "inertia": [1.0, 2.0, 3.0] }),
        details: Some(format!(
            "conserved transport: {convention}; deviations fwd {dev_fwd:.3e}, bwd {dev_bwd:.3e}"
        )),
    })
}

fn convergence_order(
    instance: &InstanceName,
    _samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SuiteReport, VerifyError> {
    su2k_pair_or_err(instance)?;
    let alg = instances::su2_algebra();
    let body = QuadraticForm::diagonal(&[1.0, 2.0, 3.0]).map_err(VerifyError::Dynamics)?;
    let xi0 = Coords::from_vec(vec![1.0, 0.1, 0.6]);
    let e0 = ep_energy(&body, &xi0);
    // accumulated drift over the horizon; the end-time value alone is noisy
    // because the orbit is periodic and the error largely cancels per period
    let drift = |h: f64| -> Result<f64, VerifyError> {
        let traj = kernel::integrate(
            &|_t: f64, y: &Coords| ep_field(&alg, &body, y),
            &xi0,
            10.0,
            h,
            10,
        )
        .map_err(|e| VerifyError::Dynamics(e.into()))?;
        Ok(traj
            .states
            .iter()
            .map(|s| (ep_energy(&body, s) - e0).abs())
            .fold(0.0f64, f64::max))
    };
    let d1 = drift(0.01)?;
    let d2 = drift(0.005)?;
    let ratio = d1 / d2;
    Ok(SuiteReport {
        suite: "convergence_order".into(),
        instance: instance.label(),
        samples: 1,
        seed,
        tolerance: tol,
        max_residual: (ratio - 16.0).abs(),
        pass: (ratio - 16.0).abs() <= tol,
        worst_input: serde_json::json!({ "xi0": coords_json(&xi0) }),
        details: Some(format!(
            "energy drift {d1:.3e} at h=0.01, {d2:.3e} at h=0.005, ratio {ratio:.2}"
        )),
    })
}

fn so_el_consistency(
    instance: &InstanceName,
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SuiteReport, VerifyError> {
    su2k_pair_or_err(instance)?;
    let su2 = instances::su2_group();
    let worst = sweep_max(samples, seed, |rng| {
        let lag = SoLagrangian {
            m_xi: QuadraticForm::identity(3),
            m_xidot: random_spd(rng, 3),
        };
        let s0 = dynamics::pack3(
            &(random_coords(rng, 3) * 0.5),
            &(random_coords(rng, 3) * 0.5),
            &(random_coords(rng, 3) * 0.5),
        );
        let res = dynamics::soep_curve_with_reconstruction(&su2, &lag, &s0, 0.3, 1e-3)
            .and_then(|curve| so_el_analysis(&su2, &lag, None, &curve))
            .map(|r| r.max_rsoel)
            .unwrap_or(f64::INFINITY);
        (res, serde_json::json!({ "s0": coords_json(&s0) }))
    });
    Ok(
        SuiteReport::from_sweep("so_el_consistency", instance, samples, seed, tol, worst)
            .with_details("second-order EL residual along integrated flows".into()),
    )
}

fn el2_consistency(
    instance: &InstanceName,
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SuiteReport, VerifyError> {
    let pair = su2k_pair_or_err(instance)?;
    let ambient = instances::sl2c_ambient_group();
    let lag = MatchedSoLagrangian::isotropic(3, 3);
    let worst = sweep_max(samples, seed, |rng| {
        let s0 = random_coords(rng, 18) * 0.3;
        let res = dynamics::msoep_curve_with_reconstruction(&pair, &ambient, &lag, &s0, 0.3, 1e-3)
            .and_then(|curve| matched_el2_analysis(&pair, &lag, None, &curve))
            .map(|r| r.max_line1.max(r.max_line2))
            .unwrap_or(f64::INFINITY);
        (res, serde_json::json!({ "s0": coords_json(&s0) }))
    });
    Ok(
        SuiteReport::from_sweep("el2_consistency", instance, samples, seed, tol, worst)
            .with_details("matched second-order EL residuals along integrated flows".into()),
    )
}

/// Probe comparing the literal final displayed third-order system against
/// the displayed general system specialized by its own abbreviations. The two
/// printed forms disagree; this suite quantifies the gap and is expected to
/// fail. It is not part of the default set.
fn r3_transcription(
    instance: &InstanceName,
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SuiteReport, VerifyError> {
    su2k_pair_or_err(instance)?;
    let worst = sweep_max(samples, seed, |rng| {
        let s = random_coords(rng, 18);
        let a = r3_explicit_field(&s);
        let b = r3_final_display_field(&s);
        (
            (a - b).amax(),
            serde_json::json!({ "state": coords_json(&s) }),
        )
    });
    Ok(
        SuiteReport::from_sweep("r3_transcription", instance, samples, seed, tol, worst)
            .with_details(
                "literal final display vs the displayed general system with its abbreviations; \
             a persistent gap here is a transcription finding, not an implementation defect"
                    .into(),
            ),
    )
}

// ---- the sign resolution experiment ---------------------------------------------

/// Outcome of running the field-equivalence check under both `b*` sign
/// conventions, together with an energy-conservation probe of the first-order
/// matched flow under both.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignResolution {
    pub instance: String,
    pub samples: u64,
    pub seed: u64,
    pub tolerance: f64,
    /// equivalence residual with `b* = +transpose`
    pub residual_plus: f64,
    /// equivalence residual with `b* = -transpose`
    pub residual_minus: f64,
    /// the convention consistent with the explicit display, when exactly one is
    pub equivalence_sign: Option<f64>,
    /// `true` when the left action vanishes and both conventions coincide
    pub indeterminate: bool,
    /// energy drift of the matched first-order flow under `+1`
    pub energy_drift_plus: f64,
    /// and under `-1`
    pub energy_drift_minus: f64,
    /// the convention under which the flow conserves energy, when exactly one
    pub energy_sign: Option<f64>,
    pub details: String,
}

fn mep_energy_drift(pair: &crate::algebra::MatchedPair) -> Result<f64, VerifyError> {
    let lg = QuadraticForm::identity(pair.g.dim());
    let lh = QuadraticForm::identity(pair.h.dim());
    let xi0 = Coords::from_fn(pair.g.dim(), |i, _| 0.3 - 0.1 * i as f64);
    let eta0 = Coords::from_fn(pair.h.dim(), |i, _| -0.2 + 0.15 * i as f64);
    let y0 = join_pair(&xi0, &eta0);
    let e0 = mep_energy(&lg, &lh, &xi0, &eta0);
    let traj = kernel::integrate(
        &|_t: f64, y: &Coords| {
            let (xi, eta) = crate::algebra::split_pair(pair, y);
            let (a, b) = mep_field(pair, &lg, &lh, &xi, &eta);
            join_pair(&a, &b)
        },
        &y0,
        2.0,
        1e-3,
        200,
    )
    .map_err(|e| VerifyError::Dynamics(e.into()))?;
    let (xi, eta) = crate::algebra::split_pair(pair, traj.last());
    Ok((mep_energy(&lg, &lh, &xi, &eta) - e0).abs())
}

/// Run the resolution experiment. Errors when neither (or, with nonvanishing
/// actions, both) conventions reproduce the explicit system.
pub fn sign_resolution(
    instance: &InstanceName,
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SignResolution, VerifyError> {
    let base = instance.matched_pair()?;
    let vanishing = base.left_action_is_zero();
    let (residual_plus, residual_minus) = match instance {
        InstanceName::Su2k => {
            let plus = field_equivalence(instance, samples, seed, tol, Some(1.0))?;
            let minus = field_equivalence(instance, samples, seed, tol, Some(-1.0))?;
            (plus.max_residual, minus.max_residual)
        }
        _ if vanishing => (0.0, 0.0),
        other => {
            return Err(VerifyError::NotApplicable {
                suite: "sign_resolution".into(),
                instance: other.label(),
            })
        }
    };
    let plus_ok = residual_plus <= tol;
    let minus_ok = residual_minus <= tol;
    let energy_drift_plus = mep_energy_drift(&base.clone().with_sign(1.0))?;
    let energy_drift_minus = mep_energy_drift(&base.clone().with_sign(-1.0))?;
    let energy_tol = 1e-8;
    let energy_sign = match (
        energy_drift_plus <= energy_tol,
        energy_drift_minus <= energy_tol,
    ) {
        (true, false) => Some(1.0),
        (false, true) => Some(-1.0),
        _ => None,
    };

    if vanishing {
        return Ok(SignResolution {
            instance: instance.label(),
            samples,
            seed,
            tolerance: tol,
            residual_plus,
            residual_minus,
            equivalence_sign: None,
            indeterminate: true,
            energy_drift_plus,
            energy_drift_minus,
            energy_sign,
            details: "indeterminate, actions vanish".into(),
        });
    }
    let equivalence_sign = match (plus_ok, minus_ok) {
        (true, false) => Some(1.0),
        (false, true) => Some(-1.0),
        (true, true) => {
            return Err(VerifyError::ConventionUnresolved(format!(
                "both conventions reproduce the explicit system ({residual_plus:e} / {residual_minus:e})"
            )))
        }
        (false, false) => {
            return Err(VerifyError::ConventionUnresolved(format!(
                "neither convention reproduces the explicit system ({residual_plus:e} / {residual_minus:e})"
            )))
        }
    };
    let details =
        format!(
        "explicit display is reproduced under sign {:+}; the first-order matched flow conserves \
         energy under sign {}; the display and the transpose definition pin opposite conventions",
        equivalence_sign.unwrap(),
        energy_sign.map(|s| format!("{s:+}")).unwrap_or_else(|| "neither".into()),
    );
    Ok(SignResolution {
        instance: instance.label(),
        samples,
        seed,
        tolerance: tol,
        residual_plus,
        residual_minus,
        equivalence_sign,
        indeterminate: false,
        energy_drift_plus,
        energy_drift_minus,
        energy_sign,
        details,
    })
}

/// Render a [`SignResolution`] as a suite-shaped report for uniform output.
pub fn sign_resolution_report(res: &SignResolution) -> SuiteReport {
    SuiteReport {
        suite: "sign_resolution".into(),
        instance: res.instance.clone(),
        samples: res.samples,
        seed: res.seed,
        tolerance: res.tolerance,
        max_residual: res.residual_plus.min(res.residual_minus),
        pass: res.indeterminate || res.equivalence_sign.is_some(),
        worst_input: serde_json::json!({
            "residual_plus": res.residual_plus,
            "residual_minus": res.residual_minus,
            "energy_drift_plus": res.energy_drift_plus,
            "energy_drift_minus": res.energy_drift_minus,
        }),
        details: Some(res.details.clone()),
    }
}
