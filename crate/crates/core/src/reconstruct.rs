//! Recovering a configuration from its PPDM, up to rigid motion.
//!
//! Subtracting the anchor row gives `C = -(R - r_a 1ᵀ)ᵀ N`, a rank-`m`
//! product. Any rank-`m` factorization `C = P Qᵀ` differs from the true one
//! by an invertible `A` with `N = A Qᵀ`; unit normals force `qₖᵀ S qₖ = 1`
//! for `S = AᵀA`, which is linear in `S`. With `S = LᵀL` we take `A = L`,
//! so the normals are `L qₖ` and the waypoints `-L⁻ᵀ pₙ`. The result is
//! unique up to an orthogonal map, which is exactly the rigid-motion gauge.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{compute_ppdm, Configuration, Plane, Ppdm};
use crate::linalg;
use crate::scalar::Real;
use crate::uniqueness::{s_system_matrix, symmetric_from};

/// Anchor-subtracted matrix and the offsets seen from the anchor waypoint.
pub fn center_ppdm<T: Real>(d: &Ppdm<T>) -> Result<(DMatrix<T>, DVector<T>)> {
    center_ppdm_at(d, 0)
}

/// [`center_ppdm`] with an arbitrary anchor row.
pub fn center_ppdm_at<T: Real>(d: &Ppdm<T>, anchor: usize) -> Result<(DMatrix<T>, DVector<T>)> {
    let e = d.entries();
    if e.nrows() < 2 {
        return Err(Error::invalid("centring needs at least two waypoints"));
    }
    if anchor >= e.nrows() {
        return Err(Error::invalid(format!("anchor row {anchor} out of range (N = {})", e.nrows())));
    }
    let q = e.row(anchor).transpose();
    let mut c = e.clone();
    for mut row in c.row_iter_mut() {
        row -= q.transpose();
    }
    Ok((c, q))
}

/// Output of [`metric_upgrade`].
#[derive(Debug, Clone)]
pub struct MetricUpgrade<T: Real> {
    /// `m × N`, waypoints relative to the anchor.
    pub waypoints: DMatrix<T>,
    /// `m × K`, unit columns.
    pub normals: DMatrix<T>,
    /// Recovered metric `S = LᵀL`.
    pub metric: DMatrix<T>,
    /// Smallest eigenvalue of `S`.
    pub gram_conditioning: T,
    /// `max |qₖᵀ S qₖ - 1|` before renormalization.
    pub unit_norm_residual: T,
    /// The unit-norm system did not pin down `S`: the input sits in an
    /// ambiguous class and the output is one member of it.
    pub metric_underdetermined: bool,
}

/// Rank-`m` factorization of `c` followed by the unit-norm metric solve.
pub fn metric_upgrade<T: Real>(c: &DMatrix<T>, m: usize, tol: T) -> Result<MetricUpgrade<T>> {
    if m != 2 && m != 3 {
        return Err(Error::invalid(format!("dimension must be 2 or 3, got {m}")));
    }
    let (n_pts, k) = c.shape();
    let svd = linalg::svd(c);
    let rank = linalg::rank(c, tol);
    if rank < m {
        return Err(Error::DegenerateTrajectoryOrRoom { rank, expected: m });
    }
    if rank > m {
        return Err(Error::invalid(format!(
            "centred matrix has rank {rank} > {m}; the input is not a PPDM of a {m}-D configuration"
        )));
    }
    let unknowns = m * (m + 1) / 2;
    if k < unknowns {
        return Err(Error::AmbiguousOrDegenerate(format!(
            "{k} walls leave the {unknowns}-parameter unit-norm system underdetermined"
        )));
    }

    let mut p = DMatrix::<T>::zeros(n_pts, m);
    let mut q = DMatrix::<T>::zeros(m, k);
    for j in 0..m {
        p.set_column(j, &(svd.u.column(j) * svd.singular_values[j]));
        q.set_row(j, &svd.v.column(j).transpose());
    }

    let cols: Vec<DVector<T>> = (0..k).map(|j| q.column(j).into_owned()).collect();
    let system = s_system_matrix(m, &cols);
    let sys_rank = linalg::rank(&system, tol);
    let s_vec = linalg::lstsq(&system, &DVector::from_element(k, T::one()), tol);
    let s_raw = symmetric_from(m, s_vec.as_slice());
    let metric = (&s_raw + s_raw.transpose()) * T::lit(0.5);
    let unit_norm_residual = (&system * &s_vec - DVector::from_element(k, T::one())).amax();

    let eig = metric.clone().symmetric_eigenvalues();
    let gram_conditioning = eig.iter().copied().fold(T::max_value().unwrap_or(T::one()), |a, b| a.min(b));
    let Some(l) = linalg::upper_cholesky(&metric) else {
        return Err(Error::AmbiguousOrDegenerate(format!(
            "recovered metric is not positive definite (smallest eigenvalue {:e})",
            gram_conditioning.as_f64()
        )));
    };
    let l_inv_t = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::AmbiguousOrDegenerate("metric factor is singular".into()))?
        .transpose();

    let mut normals = &l * &q;
    for mut col in normals.column_iter_mut() {
        let len = col.norm();
        col /= len;
    }
    let waypoints = -(l_inv_t * p.transpose());

    Ok(MetricUpgrade {
        waypoints,
        normals,
        metric,
        gram_conditioning,
        unit_norm_residual,
        metric_underdetermined: sys_rank < unknowns,
    })
}

/// A reconstructed configuration with its diagnostics.
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct ReconstructionResult<T: Real> {
    #[serde(skip)]
    pub configuration: Configuration<T>,
    /// Max-entry difference between the input and the PPDM recomputed from
    /// `configuration`.
    pub ppdm_residual: T,
    pub gram_conditioning: T,
    pub unit_norm_residual: T,
    pub metric_underdetermined: bool,
    pub anchor: usize,
}

/// Reconstruction anchored at the first waypoint.
pub fn reconstruct_configuration<T: Real>(d: &Ppdm<T>, m: usize, tol: T) -> Result<ReconstructionResult<T>> {
    reconstruct_with_anchor(d, m, tol, 0)
}

/// Reconstruction with the chosen waypoint placed at the origin.
pub fn reconstruct_with_anchor<T: Real>(d: &Ppdm<T>, m: usize, tol: T, anchor: usize) -> Result<ReconstructionResult<T>> {
    let (c, offsets) = center_ppdm_at(d, anchor)?;
    let up = metric_upgrade(&c, m, tol)?;
    let planes = (0..d.n_walls())
        .map(|k| Plane::from_direction(up.normals.column(k).into_owned(), offsets[k]))
        .collect::<Result<Vec<_>>>()?;
    let waypoints = (0..d.n_waypoints()).map(|n| up.waypoints.column(n).into_owned()).collect();
    let configuration = Configuration::new(m, planes, waypoints)?;
    let ppdm_residual = compute_ppdm(&configuration).max_abs_diff(d)?;
    let scale = linalg::max_abs(d.entries()).max(T::one());
    if ppdm_residual > T::tol(1e-6) * scale {
        return Err(Error::invalid(format!(
            "input is not a consistent PPDM: best reconstruction misses it by {:e}",
            ppdm_residual.as_f64()
        )));
    }
    Ok(ReconstructionResult {
        configuration,
        ppdm_residual,
        gram_conditioning: up.gram_conditioning,
        unit_norm_residual: up.unit_norm_residual,
        metric_underdetermined: up.metric_underdetermined,
        anchor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{apply_rigid_motion, congruence_residual, RigidMotion};
    use crate::sampling::{generic_configuration, stream_rng};

    fn generic(dim: usize, k: usize, n: usize, seed: u64) -> Configuration<f64> {
        generic_configuration(&mut stream_rng(seed, 0), dim, k, n).unwrap()
    }

    #[test]
    fn centring_has_rank_at_most_m() {
        let c = generic(3, 7, 6, 1);
        let (centred, q) = center_ppdm(&compute_ppdm(&c)).unwrap();
        assert!(linalg::rank(&centred, 1e-10) <= 3);
        assert_eq!(q.len(), 7);
        assert!(centred.row(0).amax() == 0.0);
    }

    #[test]
    fn repeated_waypoint_centres_to_zero() {
        let c = generic(2, 4, 3, 2);
        let p = c.waypoints()[0].clone();
        let same = c.with_waypoints(vec![p.clone(), p.clone(), p]).unwrap();
        let (centred, _) = center_ppdm(&compute_ppdm(&same)).unwrap();
        assert_eq!(linalg::max_abs(&centred), 0.0);
    }

    #[test]
    fn round_trip_generic() {
        for (dim, k, n) in [(3, 6, 8), (3, 6, 4), (2, 4, 3), (2, 5, 6)] {
            let c = generic(dim, k, n, 3);
            let r = reconstruct_configuration(&compute_ppdm(&c), dim, 1e-8).unwrap();
            assert!(r.ppdm_residual <= 1e-8, "{}", r.ppdm_residual);
            assert!(congruence_residual(&c, &r.configuration).unwrap() <= 1e-6);
            assert!(r.gram_conditioning > 0.0);
            assert!(r.unit_norm_residual <= 1e-9);
        }
    }

    #[test]
    fn anchor_choice_does_not_matter() {
        let c = generic(3, 6, 5, 4);
        let d = compute_ppdm(&c);
        let a = reconstruct_with_anchor(&d, 3, 1e-8, 0).unwrap();
        let b = reconstruct_with_anchor(&d, 3, 1e-8, 3).unwrap();
        assert!(congruence_residual(&a.configuration, &b.configuration).unwrap() <= 1e-6);
        assert!(b.configuration.waypoints()[3].norm() <= 1e-12);
    }

    #[test]
    fn gauge_invariance() {
        let c = generic(3, 6, 5, 6);
        let g = RigidMotion::new(
            DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
            DVector::from_vec(vec![1.0, -2.0, 0.5]),
        )
        .unwrap();
        let moved = apply_rigid_motion(&c, &g).unwrap();
        let a = reconstruct_configuration(&compute_ppdm(&c), 3, 1e-8).unwrap();
        let b = reconstruct_configuration(&compute_ppdm(&moved), 3, 1e-8).unwrap();
        assert!(congruence_residual(&a.configuration, &b.configuration).unwrap() <= 1e-6);
    }

    #[test]
    fn five_walls_in_3d_are_underdetermined() {
        let c = generic(3, 5, 6, 7);
        let err = reconstruct_configuration(&compute_ppdm(&c), 3, 1e-8).unwrap_err();
        assert_eq!(err.kind(), "AmbiguousOrDegenerate");
    }

    #[test]
    fn coplanar_waypoints_are_rank_deficient() {
        let c = generic(3, 6, 5, 8);
        let flat = c
            .waypoints()
            .iter()
            .map(|p| DVector::from_vec(vec![p[0], p[1], 0.0]))
            .collect();
        let c = c.with_waypoints(flat).unwrap();
        let err = reconstruct_configuration(&compute_ppdm(&c), 3, 1e-8).unwrap_err();
        assert_eq!(err, Error::DegenerateTrajectoryOrRoom { rank: 2, expected: 3 });
    }

    #[test]
    fn zero_matrix_is_degenerate() {
        let d = Ppdm::from_matrix(DMatrix::<f64>::zeros(4, 4)).unwrap();
        assert_eq!(
            reconstruct_configuration(&d, 2, 1e-8).unwrap_err(),
            Error::DegenerateTrajectoryOrRoom { rank: 0, expected: 2 }
        );
    }

    #[test]
    fn single_precision_round_trip() {
        let c64 = generic(2, 4, 4, 9);
        let planes = c64
            .planes()
            .iter()
            .map(|p| Plane::new(p.normal().map(|x| x as f32), p.offset() as f32).unwrap())
            .collect();
        let pts = c64.waypoints().iter().map(|p| p.map(|x| x as f32)).collect();
        let c = Configuration::new(2, planes, pts).unwrap();
        let r = reconstruct_configuration(&compute_ppdm(&c), 2, 1e-5f32).unwrap();
        assert!(congruence_residual(&c, &r.configuration).unwrap() <= 1e-3);
    }
}
