//! Pairwise comparison of two configurations.
//!
//! Thresholds scale with `max(1, largest waypoint norm, largest |offset|)`
//! over both inputs: PPDMs are equal when their entries agree to
//! `1e-8·scale`, configurations are congruent when the best rigid alignment
//! leaves at most `1e-6·scale`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{compute_ppdm, congruence_residual, lemma1_residual, room_congruence_residual, Configuration};
use crate::scalar::Real;

pub const PPDM_EQUAL_TOL: f64 = 1e-8;
pub const CONGRUENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairVerdict {
    #[serde(rename = "EqualPPDM-Congruent")]
    EqualPpdmCongruent,
    #[serde(rename = "EqualPPDM-Distinct")]
    EqualPpdmDistinct,
    #[serde(rename = "DifferentPPDM")]
    DifferentPpdm,
}

impl PairVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            PairVerdict::EqualPpdmCongruent => "EqualPPDM-Congruent",
            PairVerdict::EqualPpdmDistinct => "EqualPPDM-Distinct",
            PairVerdict::DifferentPpdm => "DifferentPPDM",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub ppdm_max_diff: f64,
    pub lemma1_residuals: (f64, f64),
    pub congruence_residual: f64,
    /// Alignment residual of the walls alone.
    pub room_congruence_residual: f64,
    /// The rooms coincide up to rigid motion, so any difference lies in
    /// the trajectories.
    pub rooms_congruent: bool,
    pub scale: f64,
    pub verdict: PairVerdict,
}

fn scale_of<T: Real>(c: &Configuration<T>) -> f64 {
    let w = c.waypoints().iter().map(|p| p.norm().as_f64()).fold(0.0, f64::max);
    let q = c.planes().iter().map(|p| p.offset().as_f64().abs()).fold(0.0, f64::max);
    w.max(q)
}

pub fn verify_pair<T: Real>(a: &Configuration<T>, b: &Configuration<T>) -> Result<VerificationReport> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    if a.n_walls() != b.n_walls() || a.n_waypoints() != b.n_waypoints() {
        return Err(Error::invalid(format!(
            "shapes differ: {} walls × {} waypoints vs {} × {}",
            a.n_walls(),
            a.n_waypoints(),
            b.n_walls(),
            b.n_waypoints()
        )));
    }
    let scale = 1f64.max(scale_of(a)).max(scale_of(b));
    let ppdm_max_diff = compute_ppdm(a).max_abs_diff(&compute_ppdm(b))?.as_f64();
    let (l1, l2) = lemma1_residual(a, b)?;
    let congruence = congruence_residual(a, b)?.as_f64();
    let room = room_congruence_residual(a, b)?.as_f64();
    let verdict = if ppdm_max_diff > PPDM_EQUAL_TOL * scale {
        PairVerdict::DifferentPpdm
    } else if congruence <= CONGRUENT_TOL * scale {
        PairVerdict::EqualPpdmCongruent
    } else {
        PairVerdict::EqualPpdmDistinct
    };
    Ok(VerificationReport {
        ppdm_max_diff,
        lemma1_residuals: (l1.as_f64(), l2.as_f64()),
        congruence_residual: congruence,
        room_congruence_residual: room,
        rooms_congruent: room <= CONGRUENT_TOL * scale,
        scale,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::ClassId;
    use crate::geometry::{apply_rigid_motion, RigidMotion};
    use crate::sampling::{generic_configuration, sample_pair, stream_rng};
    use nalgebra::DVector;

    #[test]
    fn rigid_copy_is_congruent() {
        let c: Configuration<f64> = generic_configuration(&mut stream_rng(1, 0), 2, 5, 4).unwrap();
        let g = RigidMotion::rotation_2d(1.1).compose(&RigidMotion::translation(DVector::from_vec(vec![2.0, -1.0])));
        let r = verify_pair(&c, &apply_rigid_motion(&c, &g).unwrap()).unwrap();
        assert_eq!(r.verdict, PairVerdict::EqualPpdmCongruent);
        assert!(r.rooms_congruent);
    }

    #[test]
    fn generator_pair_is_distinct() {
        let (_, pair) = sample_pair::<f64, _>(ClassId::Rank2Parallelogram, &mut stream_rng(2, 0)).unwrap();
        let r = verify_pair(&pair.reference, &pair.equivalent).unwrap();
        assert_eq!(r.verdict, PairVerdict::EqualPpdmDistinct);
        assert!(!r.rooms_congruent);
    }

    #[test]
    fn corridor_pair_has_congruent_rooms() {
        let (_, pair) = sample_pair::<f64, _>(ClassId::Rank1Corridor, &mut stream_rng(3, 0)).unwrap();
        let r = verify_pair(&pair.reference, &pair.equivalent).unwrap();
        assert_eq!(r.verdict, PairVerdict::EqualPpdmDistinct);
        assert!(r.rooms_congruent);
    }

    #[test]
    fn unrelated_configurations_differ() {
        let a: Configuration<f64> = generic_configuration(&mut stream_rng(4, 0), 3, 6, 5).unwrap();
        let b: Configuration<f64> = generic_configuration(&mut stream_rng(4, 1), 3, 6, 5).unwrap();
        assert_eq!(verify_pair(&a, &b).unwrap().verdict, PairVerdict::DifferentPpdm);
        let c: Configuration<f64> = generic_configuration(&mut stream_rng(4, 2), 2, 6, 5).unwrap();
        assert_eq!(verify_pair(&a, &c).unwrap_err().kind(), "DimensionMismatch");
    }

    #[test]
    fn verdict_serializes_with_dashes() {
        assert_eq!(serde_json::to_string(&PairVerdict::EqualPpdmDistinct).unwrap(), "\"EqualPPDM-Distinct\"");
    }
}
