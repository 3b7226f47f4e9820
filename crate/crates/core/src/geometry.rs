//! Rooms, trajectories and their point-to-plane distance matrices.
//!
//! A [`Configuration`] is a set of oriented walls plus an ordered list of
//! waypoints in two or three dimensions. Its [`Ppdm`] holds the signed
//! distance `q_k - <r_n, n_k>` from every waypoint to every wall. Rigid
//! motions (reflections included) leave the PPDM unchanged, so the
//! comparison routines here work modulo that group.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;

/// Oriented wall: unit normal and signed offset from the origin.
///
/// `(n, q)` and `(-n, -q)` are the same geometric plane but distinct
/// walls, since every signed distance to them flips.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane<T: Real> {
    normal: DVector<T>,
    offset: T,
}

impl<T: Real> Plane<T> {
    /// Builds a wall from a unit normal; the norm must be 1 within `1e-12`.
    pub fn new(normal: DVector<T>, offset: T) -> Result<Self> {
        check_dim(normal.len())?;
        let deviation = (normal.norm() - T::one()).abs();
        if deviation > T::tol(1e-12) {
            return Err(Error::invalid(format!(
                "plane normal must have unit length (|‖n‖ - 1| = {:e})",
                deviation.as_f64()
            )));
        }
        if !offset.is_finite() {
            return Err(Error::invalid("plane offset must be finite"));
        }
        Ok(Self { normal, offset })
    }

    /// Builds a wall from any non-zero direction, normalising it.
    pub fn from_direction(direction: DVector<T>, offset: T) -> Result<Self> {
        let n = direction.norm();
        if !n.is_finite() || n <= T::zero() {
            return Err(Error::invalid("plane direction must be non-zero and finite"));
        }
        Self::new(direction / n, offset)
    }

    /// 2D wall with normal `(cos φ, sin φ)`.
    pub fn from_angle(phi: T, offset: T) -> Self {
        Self {
            normal: DVector::from_vec(vec![phi.cos(), phi.sin()]),
            offset,
        }
    }

    /// 3D wall with normal `(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn from_spherical(theta: T, phi: T, offset: T) -> Self {
        Self {
            normal: DVector::from_vec(vec![theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]),
            offset,
        }
    }

    pub fn normal(&self) -> &DVector<T> {
        &self.normal
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// Same geometric plane, opposite orientation.
    pub fn flipped(&self) -> Self {
        Self {
            normal: -&self.normal,
            offset: -self.offset,
        }
    }

    /// Point of the plane closest to the origin.
    pub fn foot_point(&self) -> DVector<T> {
        &self.normal * self.offset
    }

    /// Signed distance `q - <x, n>`.
    pub fn signed_distance(&self, point: &DVector<T>) -> Result<T> {
        point_plane_distance(self, point)
    }
}

/// A room (oriented walls) together with a trajectory (ordered waypoints).
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration<T: Real> {
    dim: usize,
    planes: Vec<Plane<T>>,
    waypoints: Vec<DVector<T>>,
}

impl<T: Real> Configuration<T> {
    pub fn new(dim: usize, planes: Vec<Plane<T>>, waypoints: Vec<DVector<T>>) -> Result<Self> {
        check_dim(dim)?;
        if planes.is_empty() {
            return Err(Error::invalid("a configuration needs at least one wall"));
        }
        if waypoints.is_empty() {
            return Err(Error::invalid("a configuration needs at least one waypoint"));
        }
        for p in &planes {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
        }
        for w in &waypoints {
            if w.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: w.len(),
                });
            }
            if w.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid("waypoint coordinates must be finite"));
            }
        }
        Ok(Self { dim, planes, waypoints })
    }

    /// Builds a configuration from a normal matrix (`m × K`), offsets and a
    /// waypoint matrix (`m × N`).
    pub fn from_matrices(normals: &DMatrix<T>, offsets: &[T], waypoints: &DMatrix<T>) -> Result<Self> {
        if normals.ncols() != offsets.len() {
            return Err(Error::invalid("one offset per normal column is required"));
        }
        if normals.nrows() != waypoints.nrows() {
            return Err(Error::DimensionMismatch {
                expected: normals.nrows(),
                found: waypoints.nrows(),
            });
        }
        let planes = normals
            .column_iter()
            .zip(offsets)
            .map(|(n, &q)| Plane::new(n.into_owned(), q))
            .collect::<Result<Vec<_>>>()?;
        let points = waypoints.column_iter().map(|c| c.into_owned()).collect();
        Self::new(normals.nrows(), planes, points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn planes(&self) -> &[Plane<T>] {
        &self.planes
    }

    pub fn waypoints(&self) -> &[DVector<T>] {
        &self.waypoints
    }

    pub fn n_walls(&self) -> usize {
        self.planes.len()
    }

    pub fn n_waypoints(&self) -> usize {
        self.waypoints.len()
    }

    /// Normals as columns (`m × K`).
    pub fn normal_matrix(&self) -> DMatrix<T> {
        DMatrix::from_columns(&self.planes.iter().map(|p| p.normal.clone()).collect::<Vec<_>>())
    }

    /// Waypoints as columns (`m × N`).
    pub fn waypoint_matrix(&self) -> DMatrix<T> {
        DMatrix::from_columns(&self.waypoints)
    }

    pub fn offsets(&self) -> DVector<T> {
        DVector::from_iterator(self.planes.len(), self.planes.iter().map(|p| p.offset))
    }

    pub fn with_waypoints(&self, waypoints: Vec<DVector<T>>) -> Result<Self> {
        Self::new(self.dim, self.planes.clone(), waypoints)
    }

    pub fn with_planes(&self, planes: Vec<Plane<T>>) -> Result<Self> {
        Self::new(self.dim, planes, self.waypoints.clone())
    }

    /// Largest of 1, the waypoint norms and the absolute wall offsets.
    /// Absolute residual tolerances are multiplied by this.
    pub fn bounding_radius(&self) -> T {
        let w = self.waypoints.iter().fold(T::one(), |acc, r| acc.max(r.norm()));
        self.planes.iter().fold(w, |acc, p| acc.max(p.offset.abs()))
    }

    /// Translates every waypoint by `t`; offsets follow (`q ↦ q + <t, n>`).
    pub fn translated(&self, t: &DVector<T>) -> Result<Self> {
        let motion = RigidMotion::translation(t.clone());
        apply_rigid_motion(self, &motion)
    }

    /// Reverses the orientation of wall `k`.
    pub fn with_flipped_wall(&self, k: usize) -> Result<Self> {
        let mut planes = self.planes.clone();
        let p = planes
            .get_mut(k)
            .ok_or_else(|| Error::invalid(format!("wall index {k} out of range")))?;
        *p = p.flipped();
        self.with_planes(planes)
    }
}

/// `N × K` matrix of signed waypoint-to-wall distances.
#[derive(Debug, Clone, PartialEq)]
pub struct Ppdm<T: Real> {
    entries: DMatrix<T>,
}

impl<T: Real> Ppdm<T> {
    pub fn from_matrix(entries: DMatrix<T>) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::invalid("a PPDM needs at least one row and one column"));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("PPDM entries must be finite"));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &DMatrix<T> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.entries
    }

    pub fn n_waypoints(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_walls(&self) -> usize {
        self.entries.ncols()
    }

    pub fn get(&self, waypoint: usize, wall: usize) -> T {
        self.entries[(waypoint, wall)]
    }

    /// Largest entrywise absolute difference; shapes must agree.
    pub fn max_abs_diff(&self, other: &Ppdm<T>) -> Result<T> {
        if self.entries.shape() != other.entries.shape() {
            return Err(Error::invalid(format!(
                "PPDM shapes differ: {:?} vs {:?}",
                self.entries.shape(),
                other.entries.shape()
            )));
        }
        Ok(linalg::max_abs(&(&self.entries - &other.entries)))
    }
}

/// `x ↦ Q x + t` with `Q` orthogonal (reflections allowed).
#[derive(Debug, Clone, PartialEq)]
pub struct RigidMotion<T: Real> {
    rotation: DMatrix<T>,
    translation: DVector<T>,
}

impl<T: Real> RigidMotion<T> {
    pub fn new(rotation: DMatrix<T>, translation: DVector<T>) -> Result<Self> {
        let m = rotation.nrows();
        check_dim(m)?;
        if rotation.ncols() != m {
            return Err(Error::invalid("rotation must be square"));
        }
        if translation.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: translation.len(),
            });
        }
        let deviation = linalg::max_abs(&(rotation.transpose() * &rotation - DMatrix::identity(m, m)));
        if deviation > T::tol(1e-12) {
            return Err(Error::NonOrthogonalRotation {
                deviation: deviation.as_f64(),
            });
        }
        Ok(Self { rotation, translation })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            rotation: DMatrix::identity(dim, dim),
            translation: DVector::zeros(dim),
        }
    }

    pub fn translation(t: DVector<T>) -> Self {
        let m = t.len();
        Self {
            rotation: DMatrix::identity(m, m),
            translation: t,
        }
    }

    /// Counter-clockwise planar rotation about the origin.
    pub fn rotation_2d(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            rotation: DMatrix::from_row_slice(2, 2, &[c, -s, s, c]),
            translation: DVector::zeros(2),
        }
    }

    pub fn rotation(&self) -> &DMatrix<T> {
        &self.rotation
    }

    pub fn translation_vector(&self) -> &DVector<T> {
        &self.translation
    }

    pub fn dim(&self) -> usize {
        self.rotation.nrows()
    }

    pub fn apply_point(&self, x: &DVector<T>) -> DVector<T> {
        &self.rotation * x + &self.translation
    }

    pub fn apply_plane(&self, plane: &Plane<T>) -> Plane<T> {
        let normal = &self.rotation * &plane.normal;
        let offset = plane.offset + self.translation.dot(&normal);
        Plane { normal, offset }
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        let translation = -(&rt * &self.translation);
        Self {
            rotation: rt,
            translation,
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            rotation: &self.rotation * &other.rotation,
            translation: &self.rotation * &other.translation + &self.translation,
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::invalid(format!("dimension must be 2 or 3, got {dim}")))
    }
}

/// Distance travelled to a wall and back: `c τ / 2`.
pub fn distance_from_tof<T: Real>(tau: T, speed: T) -> Result<T> {
    if !tau.is_finite() || tau < T::zero() {
        return Err(Error::invalid("time of flight must be non-negative and finite"));
    }
    if !speed.is_finite() || speed <= T::zero() {
        return Err(Error::invalid("propagation speed must be positive and finite"));
    }
    Ok(speed * tau * T::lit(0.5))
}

/// Signed distance `q - <x, n>` from `point` to `plane`.
pub fn point_plane_distance<T: Real>(plane: &Plane<T>, point: &DVector<T>) -> Result<T> {
    if plane.dim() != point.len() {
        return Err(Error::DimensionMismatch {
            expected: plane.dim(),
            found: point.len(),
        });
    }
    Ok(plane.offset - point.dot(&plane.normal))
}

/// `D = 1 qᵀ - Rᵀ N`.
pub fn compute_ppdm<T: Real>(config: &Configuration<T>) -> Ppdm<T> {
    let entries = DMatrix::from_fn(config.n_waypoints(), config.n_walls(), |n, k| {
        let plane = &config.planes[k];
        plane.offset - config.waypoints[n].dot(&plane.normal)
    });
    Ppdm { entries }
}

pub fn apply_rigid_motion<T: Real>(config: &Configuration<T>, motion: &RigidMotion<T>) -> Result<Configuration<T>> {
    if motion.dim() != config.dim {
        return Err(Error::DimensionMismatch {
            expected: config.dim,
            found: motion.dim(),
        });
    }
    Ok(Configuration {
        dim: config.dim,
        planes: config.planes.iter().map(|p| motion.apply_plane(p)).collect(),
        waypoints: config.waypoints.iter().map(|r| motion.apply_point(r)).collect(),
    })
}

fn check_comparable<T: Real>(a: &Configuration<T>, b: &Configuration<T>) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    if a.n_walls() != b.n_walls() || a.n_waypoints() != b.n_waypoints() {
        return Err(Error::invalid(format!(
            "configurations differ in size: {}x{} vs {}x{}",
            a.n_waypoints(),
            a.n_walls(),
            b.n_waypoints(),
            b.n_walls()
        )));
    }
    Ok(())
}

fn centroid<T: Real>(points: &[DVector<T>]) -> DVector<T> {
    let n = T::from_usize(points.len()).expect("count fits scalar");
    points.iter().fold(DVector::zeros(points[0].len()), |acc, p| acc + p) / n
}

/// Mismatch after moving `a` by `g`: the largest waypoint distance, normal
/// distance or offset difference.
fn mismatch<T: Real>(a: &Configuration<T>, b: &Configuration<T>, g: &RigidMotion<T>, with_waypoints: bool) -> T {
    let mut worst = T::zero();
    if with_waypoints {
        for (ra, rb) in a.waypoints.iter().zip(&b.waypoints) {
            worst = worst.max((g.apply_point(ra) - rb).norm());
        }
    }
    for (pa, pb) in a.planes.iter().zip(&b.planes) {
        let moved = g.apply_plane(pa);
        worst = worst.max((&moved.normal - &pb.normal).norm());
        worst = worst.max((moved.offset - pb.offset).abs());
    }
    worst
}

/// Candidate alignments `a → b`: Procrustes on centred waypoints (when they
/// span the space) and on waypoints and normals jointly, both reflection
/// branches each.
fn alignment_candidates<T: Real>(a: &Configuration<T>, b: &Configuration<T>) -> Vec<RigidMotion<T>> {
    let m = a.dim;
    let ca = centroid(&a.waypoints);
    let cb = centroid(&b.waypoints);
    let mut h_points = DMatrix::<T>::zeros(m, m);
    let mut spread = T::zero();
    for (ra, rb) in a.waypoints.iter().zip(&b.waypoints) {
        let da = ra - &ca;
        let db = rb - &cb;
        spread = spread.max(da.norm());
        h_points += &da * db.transpose();
    }
    let mut h_normals = DMatrix::<T>::zeros(m, m);
    for (pa, pb) in a.planes.iter().zip(&b.planes) {
        h_normals += &pa.normal * pb.normal.transpose();
    }
    let weight = T::one() + spread * spread;
    let joint = &h_points + &h_normals * weight;

    let mut out = Vec::with_capacity(4);
    let mut push = |h: &DMatrix<T>| {
        for q in linalg::procrustes_branches(h) {
            let t = &cb - &q * &ca;
            out.push(RigidMotion {
                rotation: q,
                translation: t,
            });
        }
    };
    if crate::uniqueness::affine_rank(&a.waypoints, T::tol(1e-9)) == m {
        push(&h_points);
    }
    push(&joint);
    out
}

/// Candidate alignments of the rooms alone: Procrustes on normals, then the
/// least-squares translation matching the offsets.
fn room_alignment_candidates<T: Real>(a: &Configuration<T>, b: &Configuration<T>) -> Vec<RigidMotion<T>> {
    let m = a.dim;
    let mut h = DMatrix::<T>::zeros(m, m);
    for (pa, pb) in a.planes.iter().zip(&b.planes) {
        h += &pa.normal * pb.normal.transpose();
    }
    linalg::procrustes_branches(&h)
        .into_iter()
        .map(|q| {
            // <t, Q n_a> = q_b - q_a for every wall.
            let rows = a.n_walls();
            let mut lhs = DMatrix::<T>::zeros(rows, m);
            let mut rhs = DVector::<T>::zeros(rows);
            for (k, (pa, pb)) in a.planes.iter().zip(&b.planes).enumerate() {
                let rn = &q * &pa.normal;
                lhs.set_row(k, &rn.transpose());
                rhs[k] = pb.offset - pa.offset;
            }
            let t = linalg::lstsq(&lhs, &rhs, T::tol(1e-12));
            RigidMotion {
                rotation: q,
                translation: t,
            }
        })
        .collect()
}

fn symmetric_residual<T: Real>(
    a: &Configuration<T>,
    b: &Configuration<T>,
    with_waypoints: bool,
    candidates: impl Fn(&Configuration<T>, &Configuration<T>) -> Vec<RigidMotion<T>>,
) -> T {
    let forward = candidates(a, b);
    let backward = candidates(b, a).into_iter().map(|g| g.inverse());
    forward
        .into_iter()
        .chain(backward)
        .map(|g| {
            let ab = mismatch(a, b, &g, with_waypoints);
            let ba = mismatch(b, a, &g.inverse(), with_waypoints);
            ab.max(ba)
        })
        .fold(T::max_value().unwrap_or_else(|| T::lit(f64::MAX)), |x, y| x.min(y))
}

/// How far `b` is from being a rigidly moved copy of `a` (walls and
/// waypoints matched by index).
///
/// The alignment is the best of the Procrustes candidates described on
/// `alignment_candidates`; the residual is the largest waypoint distance,
/// normal distance or offset difference under that alignment, evaluated in
/// both directions so the result is symmetric.
pub fn congruence_residual<T: Real>(a: &Configuration<T>, b: &Configuration<T>) -> Result<T> {
    check_comparable(a, b)?;
    Ok(symmetric_residual(a, b, true, alignment_candidates))
}

/// Like [`congruence_residual`] but ignoring the trajectories.
pub fn room_congruence_residual<T: Real>(a: &Configuration<T>, b: &Configuration<T>) -> Result<T> {
    if a.dim != b.dim || a.n_walls() != b.n_walls() {
        return Err(Error::invalid("rooms must share dimension and wall count"));
    }
    Ok(symmetric_residual(a, b, false, room_alignment_candidates))
}

/// Residuals of the shared-PPDM condition after moving each configuration's
/// first waypoint to the origin: `(max |R̄ᵀ N̄|, max_k |q_k^a - q_k^b|)`.
///
/// Both vanish exactly when the two configurations have the same PPDM.
pub fn lemma1_residual<T: Real>(a: &Configuration<T>, b: &Configuration<T>) -> Result<(T, T)> {
    check_comparable(a, b)?;
    let a0 = a.translated(&(-&a.waypoints[0]))?;
    let b0 = b.translated(&(-&b.waypoints[0]))?;
    let gram_a = a0.waypoint_matrix().transpose() * a0.normal_matrix();
    let gram_b = b0.waypoint_matrix().transpose() * b0.normal_matrix();
    let stacked = gram_a - gram_b;
    let offsets = a0.offsets() - b0.offsets();
    Ok((linalg::max_abs(&stacked), offsets.amax()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    fn square_room() -> Configuration<f64> {
        // Unit square [0,1]², normals pointing outward so interior distances are positive.
        let planes = vec![
            Plane::new(v(&[-1.0, 0.0]), 0.0).unwrap(),
            Plane::new(v(&[0.0, -1.0]), 0.0).unwrap(),
            Plane::new(v(&[1.0, 0.0]), 1.0).unwrap(),
            Plane::new(v(&[0.0, 1.0]), 1.0).unwrap(),
        ];
        Configuration::new(2, planes, vec![v(&[0.5, 0.5]), v(&[0.2, 0.7]), v(&[0.9, 0.1])]).unwrap()
    }

    #[test]
    fn tof_examples() {
        assert_eq!(distance_from_tof(0.0, 343.0).unwrap(), 0.0);
        assert_eq!(distance_from_tof(1.0, 2.0).unwrap(), 1.0);
        assert_abs_diff_eq!(distance_from_tof(0.01, 343.0).unwrap(), 1.715, epsilon = 1e-12);
        assert!(distance_from_tof(-1.0, 343.0).is_err());
        assert!(distance_from_tof(1.0, 0.0).is_err());
    }

    #[test]
    fn point_plane_examples() {
        let p = Plane::new(v(&[-1.0, 0.0]), 0.0).unwrap();
        assert_eq!(point_plane_distance(&p, &v(&[2.0, 1.0])).unwrap(), 2.0);
        let p = Plane::new(v(&[1.0, 0.0]), 0.0).unwrap();
        assert_eq!(point_plane_distance(&p, &v(&[2.0, 1.0])).unwrap(), -2.0);
        let p = Plane::new(v(&[0.6, 0.8]), 1.0).unwrap();
        assert_abs_diff_eq!(point_plane_distance(&p, &v(&[1.0, 1.0])).unwrap(), -0.4, epsilon = 1e-15);
        assert!(point_plane_distance(&p, &v(&[1.0, 1.0, 0.0])).is_err());
    }

    #[test]
    fn plane_requires_unit_normal() {
        assert!(Plane::new(v(&[1.0, 1.0]), 0.0).is_err());
        let p = Plane::from_direction(v(&[3.0, 4.0]), 2.0).unwrap();
        assert_abs_diff_eq!(p.normal()[0], 0.6, epsilon = 1e-15);
    }

    #[test]
    fn ppdm_examples() {
        let room = square_room();
        let d = compute_ppdm(&room);
        for k in 0..4 {
            assert_abs_diff_eq!(d.get(0, k), 0.5, epsilon = 1e-15);
        }
        let at_origin = room.with_waypoints(vec![v(&[0.0, 0.0]), v(&[0.0, 0.0])]).unwrap();
        let d0 = compute_ppdm(&at_origin);
        for n in 0..2 {
            for k in 0..4 {
                assert_eq!(d0.get(n, k), room.planes()[k].offset());
            }
        }
        let single = Configuration::new(
            2,
            vec![Plane::new(v(&[-1.0, 0.0]), 0.0).unwrap()],
            vec![v(&[0.0, 0.0]), v(&[1.0, 0.0])],
        )
        .unwrap();
        let d1 = compute_ppdm(&single);
        assert_eq!(d1.get(0, 0), 0.0);
        assert_eq!(d1.get(1, 0), 1.0);
    }

    #[test]
    fn rigid_motion_examples() {
        let room = square_room();
        let same = apply_rigid_motion(&room, &RigidMotion::identity(2)).unwrap();
        assert_eq!(same, room);

        let single = Configuration::new(2, vec![Plane::new(v(&[-1.0, 0.0]), 0.0).unwrap()], vec![v(&[2.0, 1.0])]).unwrap();
        let turned = apply_rigid_motion(&single, &RigidMotion::rotation_2d(FRAC_PI_2)).unwrap();
        assert_abs_diff_eq!((turned.planes()[0].normal() - v(&[0.0, -1.0])).amax(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(turned.planes()[0].offset(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((&turned.waypoints()[0] - v(&[-1.0, 2.0])).amax(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(compute_ppdm(&turned).get(0, 0), 2.0, epsilon = 1e-15);

        let wall = Configuration::new(2, vec![Plane::new(v(&[1.0, 0.0]), 0.0).unwrap()], vec![v(&[0.0, 0.0])]).unwrap();
        let shifted = wall.translated(&v(&[1.0, 0.0])).unwrap();
        assert_eq!(shifted.planes()[0].offset(), 1.0);

        let skew = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(
            RigidMotion::new(skew, v(&[0.0, 0.0])),
            Err(Error::NonOrthogonalRotation { .. })
        ));
    }

    #[test]
    fn congruence_of_moved_copy() {
        let room = square_room();
        assert!(congruence_residual(&room, &room).unwrap() <= 1e-12);
        let g = RigidMotion::rotation_2d(FRAC_PI_2).compose(&RigidMotion::translation(v(&[3.0, -1.0])));
        let moved = apply_rigid_motion(&room, &g).unwrap();
        assert!(congruence_residual(&room, &moved).unwrap() <= 1e-9);
        let mirror = RigidMotion::new(DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]), v(&[0.5, 0.0])).unwrap();
        let mirrored = apply_rigid_motion(&room, &mirror).unwrap();
        assert!(congruence_residual(&room, &mirrored).unwrap() <= 1e-9);
    }

    #[test]
    fn congruence_detects_different_trajectory() {
        let room = square_room();
        let other = room.with_waypoints(vec![v(&[0.5, 0.5]), v(&[0.2, 0.7]), v(&[0.9, 0.3])]).unwrap();
        assert!(congruence_residual(&room, &other).unwrap() > 1e-3);
        assert!(room_congruence_residual(&room, &other).unwrap() <= 1e-12);
        assert!(congruence_residual(&room, &room.with_waypoints(vec![v(&[0.0, 0.0])]).unwrap()).is_err());
    }

    #[test]
    fn lemma1_self_pair_is_zero() {
        let room = square_room();
        let (gram, offsets) = lemma1_residual(&room, &room).unwrap();
        assert_eq!(gram, 0.0);
        assert_eq!(offsets, 0.0);
    }

    #[test]
    fn flipping_a_wall_negates_its_column() {
        let room = square_room();
        let flipped = room.with_flipped_wall(2).unwrap();
        let (d, e) = (compute_ppdm(&room), compute_ppdm(&flipped));
        for n in 0..room.n_waypoints() {
            for k in 0..room.n_walls() {
                let expected = if k == 2 { -d.get(n, k) } else { d.get(n, k) };
                assert_eq!(e.get(n, k), expected);
            }
        }
    }

    #[test]
    fn single_precision_ppdm() {
        let p = Plane::<f32>::from_angle(0.3, 1.0);
        let c = Configuration::new(2, vec![p], vec![DVector::from_vec(vec![0.5f32, 0.25])]).unwrap();
        let d = compute_ppdm(&c);
        let expected = 1.0 - (0.5 * 0.3f32.cos() + 0.25 * 0.3f32.sin());
        assert!((d.get(0, 0) - expected).abs() < 1e-6);
    }
}
