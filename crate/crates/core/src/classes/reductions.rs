//! Alternative column choices and their transformation to the canonical
//! dependency systems.
//!
//! The class analyses fix one particular set of independent columns of the
//! stacked normal matrix. Any other choice can be rewritten into one of the
//! canonical forms by solving one row of the alternative system for the
//! missing coordinate and substituting it into the others. The functions
//! here perform that rewriting; the `check_*` functions run the full loop
//! on a generated pair (build the alternative system from data, reduce it,
//! rotate back) and report the largest mismatch with the canonical output.

use nalgebra::{DMatrix, DVector};

use super::planar::{gen_corridor_pair, gen_parallelogram_pair, CorridorParams, ParallelogramParams};
use super::spatial::{gen_parallelepiped_pair, gen_planar_trajectory_pair, gen_rank3_pair};
use super::{ClassId, ParallelepipedParams, PlanarTrajectoryParams, Rank3MiscParams};
use crate::error::{Error, Result};
use crate::geometry::{apply_rigid_motion, Configuration, RigidMotion};
use crate::linalg;
use crate::scalar::Real;

/// Least-squares coefficients `M` with `lhs ≈ M · rhs` (one column per wall).
pub fn fit_dependency<T: Real>(lhs: &DMatrix<T>, rhs: &DMatrix<T>) -> Result<DMatrix<T>> {
    if lhs.ncols() != rhs.ncols() {
        return Err(Error::DimensionMismatch {
            expected: rhs.ncols(),
            found: lhs.ncols(),
        });
    }
    let svd = linalg::svd(&rhs.transpose());
    Ok(svd.solve(&lhs.transpose(), T::tol(1e-13)).transpose())
}

fn nonzero<T: Real>(x: T) -> bool {
    x.abs() > T::tol(1e-12)
}

/// 2D rank-1 with the reference columns swapped: `cos φ⁰ = α sin φ⁰`.
/// Rotating the reference room by π/2 gives the canonical corridor
/// `sin φ⁰ = a cos φ⁰` with `a = -α`. Returns `a` and the rotation.
pub fn rank1_2d_from_swapped<T: Real>(alpha: T) -> (T, RigidMotion<T>) {
    (-alpha, RigidMotion::rotation_2d(T::frac_pi_2()))
}

/// 2D rank-2 with alternative columns
/// `(cos φ, cos φ⁰) = M (sin φ, sin φ⁰)`, `M = [[a, b], [c, d]]`.
/// Returns `T` with `n = T n⁰`: `(1/c) [[a, bc - ad], [1, -d]]`.
pub fn rank2_2d_from_alternative<T: Real>(m: &DMatrix<T>) -> Result<DMatrix<T>> {
    check_shape(m, 2, 2)?;
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    if !nonzero(c) {
        return Err(Error::Redirect {
            target: ClassId::Rank1Corridor,
            detail: "c = 0 fixes tan φ⁰ = 1/d, all reference walls are parallel".into(),
        });
    }
    Ok(DMatrix::from_row_slice(2, 2, &[a, b * c - a * d, T::one(), -d]) / c)
}

/// 3D rank-2 with alternative columns
/// `(z⁰, y⁰, y, z) = M (x⁰, x)` for a 4×2 `M = [[a, b], [c, d], [e, f], [g, h]]`.
/// Returns the canonical 4×2 system `(z⁰, x, y, z) = T (x⁰, y⁰)`:
/// `(1/d) [[ad - bc, b], [-c, 1], [ed - cf, f], [gd - ch, h]]`.
pub fn rank2_3d_from_alternative<T: Real>(m: &DMatrix<T>) -> Result<DMatrix<T>> {
    check_shape(m, 4, 2)?;
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let (e, f, g, h) = (m[(2, 0)], m[(2, 1)], m[(3, 0)], m[(3, 1)]);
    if !nonzero(d) {
        return Err(if nonzero(b) {
            Error::invalid("d = 0: substitute x from the first row instead; the reference normals satisfy y⁰ = c x⁰")
        } else {
            Error::Redirect {
                target: ClassId::Rank1Corridor3D,
                detail: "b = d = 0 makes every normal constant".into(),
            }
        });
    }
    let rows = [a * d - b * c, b, -c, T::one(), e * d - c * f, f, g * d - c * h, h];
    Ok(DMatrix::from_row_slice(4, 2, &rows) / d)
}

/// 3D rank-3 with alternative columns
/// `(x, y, z⁰) = M (x⁰, y⁰, z)`, `M = [[a, b, c], [d, e, f], [g, h, i]]`.
/// Returns `T` with `n = T n⁰`:
/// `(1/i) [[ai - cg, bi - ch, c], [di - fg, ei - fh, f], [-g, -h, 1]]`.
pub fn rank3_3d_from_alternative<T: Real>(m: &DMatrix<T>) -> Result<DMatrix<T>> {
    check_shape(m, 3, 3)?;
    let at = |r, c| m[(r, c)];
    let (a, b, c) = (at(0, 0), at(0, 1), at(0, 2));
    let (d, e, f) = (at(1, 0), at(1, 1), at(1, 2));
    let (g, h, i) = (at(2, 0), at(2, 1), at(2, 2));
    if !nonzero(i) {
        return Err(Error::Redirect {
            target: ClassId::Rank4PlanarTrajectory,
            detail: "i = 0: substituting from the last row yields the planar-trajectory system".into(),
        });
    }
    let rows = [
        a * i - c * g,
        b * i - c * h,
        c,
        d * i - f * g,
        e * i - f * h,
        f,
        -g,
        -h,
        T::one(),
    ];
    Ok(DMatrix::from_row_slice(3, 3, &rows) / i)
}

/// 3D rank-4 with alternative columns
/// `(x, x⁰) = M (y, y⁰, z⁰, z)`, `M = [[a, b, c, d], [e, f, g, h]]`.
/// Returns the canonical 2×4 system `(x, y) = T (x⁰, y⁰, z⁰, z)`:
/// `(1/e) [[a, be - af, ce - ag, de - ah], [1, -f, -g, -h]]`.
pub fn rank4_3d_from_alternative<T: Real>(m: &DMatrix<T>) -> Result<DMatrix<T>> {
    check_shape(m, 2, 4)?;
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(0, 2)], m[(0, 3)]);
    let (e, f, g, h) = (m[(1, 0)], m[(1, 1)], m[(1, 2)], m[(1, 3)]);
    if !nonzero(e) {
        return Err(Error::Redirect {
            target: if nonzero(h) {
                ClassId::Rank4PlanarTrajectory
            } else {
                ClassId::Rank5LinearTrajectory
            },
            detail: "e = 0: substitute from the second row instead".into(),
        });
    }
    let rows = [a, b * e - a * f, c * e - a * g, d * e - a * h, T::one(), -f, -g, -h];
    Ok(DMatrix::from_row_slice(2, 4, &rows) / e)
}

/// Splits `t = Q U` with `Q` orthogonal and `U` upper triangular with a
/// non-negative diagonal. Rotating the equivalent room by `Qᵀ` turns a
/// general `T` into the upper-triangular form the generators use; the
/// remaining sign freedom on the diagonal is a reflection.
pub fn canonical_upper<T: Real>(t: &DMatrix<T>) -> (DMatrix<T>, DMatrix<T>) {
    linalg::orthogonal_upper(t)
}

fn check_shape<T: Real>(m: &DMatrix<T>, rows: usize, cols: usize) -> Result<()> {
    if m.nrows() == rows && m.ncols() == cols {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "expected a {rows}×{cols} coefficient matrix, found {}×{}",
            m.nrows(),
            m.ncols()
        )))
    }
}

/// Index-wise distance between two configurations: largest difference in
/// any normal component, offset or waypoint coordinate.
pub fn config_gap<T: Real>(a: &Configuration<T>, b: &Configuration<T>) -> T {
    if a.dim() != b.dim() || a.n_walls() != b.n_walls() || a.n_waypoints() != b.n_waypoints() {
        return T::max_value().unwrap_or(T::one() / T::default_epsilon());
    }
    let planes = a.planes().iter().zip(b.planes()).fold(T::zero(), |m, (p, q)| {
        m.max((p.normal() - q.normal()).amax()).max((p.offset() - q.offset()).abs())
    });
    a.waypoints()
        .iter()
        .zip(b.waypoints())
        .fold(planes, |m, (r, s)| m.max((r - s).amax()))
}

/// Stacks selected normal coordinates of one or two rooms into rows.
/// `picks` lists `(room, coordinate)` with room 0 = reference.
fn rows_of<T: Real>(rooms: [&Configuration<T>; 2], picks: &[(usize, usize)]) -> DMatrix<T> {
    let k = rooms[0].n_walls();
    DMatrix::from_fn(picks.len(), k, |row, wall| {
        let (room, coord) = picks[row];
        rooms[room].planes()[wall].normal()[coord]
    })
}

fn rotate<T: Real>(config: &Configuration<T>, q: &DMatrix<T>) -> Result<Configuration<T>> {
    let dim = config.dim();
    apply_rigid_motion(config, &RigidMotion::new(q.clone(), DVector::zeros(dim))?)
}

/// Flips columns of `q` (and rows of `u`) so the diagonal of `u` carries
/// the signs of the diagonal of `target`.
fn match_signs<T: Real>(q: &mut DMatrix<T>, u: &mut DMatrix<T>, target: &DMatrix<T>) {
    for i in 0..u.nrows().min(u.ncols()).min(target.nrows()).min(target.ncols()) {
        if (u[(i, i)] < T::zero()) != (target[(i, i)] < T::zero()) {
            u.row_mut(i).neg_mut();
            q.column_mut(i).neg_mut();
        }
    }
}

/// 2D rank-1 loop: rotate the reference of a canonical corridor by -π/2 so
/// that it satisfies the swapped system, fit `(α, b, c)` from the normals,
/// reduce, and compare with a corridor regenerated from the reduced `a`.
pub fn check_rank1_2d<T: Real>(p: &CorridorParams<T>) -> Result<T> {
    let pair = gen_corridor_pair(p)?;
    let swapped_ref = apply_rigid_motion(&pair.reference, &RigidMotion::rotation_2d(-T::frac_pi_2()))?;
    let rooms = [&swapped_ref, &pair.equivalent];
    let fit = fit_dependency(&rows_of(rooms, &[(0, 0), (1, 0), (1, 1)]), &rows_of(rooms, &[(0, 1)]))?;
    let (a, rot) = rank1_2d_from_swapped(fit[(0, 0)]);
    let reference = apply_rigid_motion(&swapped_ref, &rot)?;

    let regenerated = gen_corridor_pair(&CorridorParams {
        a,
        waypoints0: reference.waypoints().iter().map(|r| r.iter().copied().collect()).collect(),
        free_coords: Some(pair.equivalent.waypoints().iter().map(|r| r[1]).collect()),
        ..p.clone()
    })?;
    Ok((a - p.a)
        .abs()
        .max(config_gap(&reference, &pair.reference))
        .max(config_gap(&regenerated.reference, &reference))
        .max(config_gap(&regenerated.equivalent, &pair.equivalent)))
}

/// 2D rank-2 loop: rotate the equivalent of a canonical parallelogram pair
/// by `rotation`, fit the alternative system, reduce to `T`, split off the
/// rotation and compare with the generator.
pub fn check_rank2_2d<T: Real>(p: &ParallelogramParams<T>, rotation: T) -> Result<T> {
    let pair = gen_parallelogram_pair(p)?;
    let t_gen = pair.transform.clone().ok_or_else(|| Error::invalid("parallelogram pair without T"))?;
    let turn = RigidMotion::rotation_2d(rotation);
    let moved = apply_rigid_motion(&pair.equivalent, &turn)?;
    let rooms = [&pair.reference, &moved];
    let m = fit_dependency(&rows_of(rooms, &[(1, 0), (0, 0)]), &rows_of(rooms, &[(1, 1), (0, 1)]))?;
    let t_alt = rank2_2d_from_alternative(&m)?;
    let mut gap = linalg::max_abs(&(&t_alt - turn.rotation() * &t_gen));

    let (mut q, mut u) = canonical_upper(&t_alt);
    match_signs(&mut q, &mut u, &t_gen);
    gap = gap.max(linalg::max_abs(&(&u - &t_gen)));
    let back = rotate(&moved, &q.transpose())?;
    Ok(gap.max(config_gap(&back, &pair.equivalent)))
}

/// 3D rank-2 loop on the parallelepiped generator. The waypoint coordinate
/// along the common axis is free in this class, so the rotated-back pair is
/// compared with a regeneration that uses those coordinates.
pub fn check_rank2_3d<T: Real>(p: &ParallelepipedParams<T>, rotation: &DMatrix<T>) -> Result<T> {
    let pair = gen_parallelepiped_pair(p)?;
    let m_gen = pair.transform.clone().ok_or_else(|| Error::invalid("parallelepiped pair without T"))?;
    let block = m_gen.columns(0, 2).into_owned();
    let moved = rotate(&pair.equivalent, rotation)?;
    let rooms = [&pair.reference, &moved];
    let m = fit_dependency(
        &rows_of(rooms, &[(0, 2), (0, 1), (1, 1), (1, 2)]),
        &rows_of(rooms, &[(0, 0), (1, 0)]),
    )?;
    let t_alt = rank2_3d_from_alternative(&m)?;
    let mut gap = (t_alt[(0, 0)] - p.a).abs().max((t_alt[(0, 1)] - p.b).abs());
    let lower = t_alt.rows(1, 3).into_owned();
    gap = gap.max(linalg::max_abs(&(&lower - rotation * &block)));

    let (mut q, mut u) = canonical_upper(&lower);
    match_signs(&mut q, &mut u, &block);
    gap = gap.max(linalg::max_abs(&(&u - &block)));
    let back = rotate(&moved, &q.transpose())?;
    let regenerated = gen_parallelepiped_pair(&ParallelepipedParams {
        free_z: Some(back.waypoints().iter().map(|r| r[2]).collect()),
        ..p.clone()
    })?;
    Ok(gap
        .max(config_gap(&regenerated.reference, &pair.reference))
        .max(config_gap(&regenerated.equivalent, &back)))
}

/// 3D rank-3 loop on the miscellaneous generator.
pub fn check_rank3_3d<T: Real>(p: &Rank3MiscParams<T>, rotation: &DMatrix<T>) -> Result<T> {
    let pair = gen_rank3_pair(p)?;
    let t_gen = pair.transform.clone().ok_or_else(|| Error::invalid("rank-3 pair without T"))?;
    let moved = rotate(&pair.equivalent, rotation)?;
    let rooms = [&pair.reference, &moved];
    let m = fit_dependency(
        &rows_of(rooms, &[(1, 0), (1, 1), (0, 2)]),
        &rows_of(rooms, &[(0, 0), (0, 1), (1, 2)]),
    )?;
    let t_alt = rank3_3d_from_alternative(&m)?;
    let mut gap = linalg::max_abs(&(&t_alt - rotation * &t_gen));

    let (mut q, mut u) = canonical_upper(&t_alt);
    match_signs(&mut q, &mut u, &t_gen);
    gap = gap.max(linalg::max_abs(&(&u - &t_gen)));
    let back = rotate(&moved, &q.transpose())?;
    Ok(gap.max(config_gap(&back, &pair.equivalent)))
}

/// 3D rank-4 loop on the planar-trajectory generator: fit the alternative
/// system, reduce it, and regenerate the pair from the reduced parameters.
pub fn check_rank4_3d<T: Real>(p: &PlanarTrajectoryParams<T>) -> Result<T> {
    let pair = gen_planar_trajectory_pair(p)?;
    let rooms = [&pair.reference, &pair.equivalent];
    let m = fit_dependency(
        &rows_of(rooms, &[(1, 0), (0, 0)]),
        &rows_of(rooms, &[(1, 1), (0, 1), (0, 2), (1, 2)]),
    )?;
    let t = rank4_3d_from_alternative(&m)?;
    let flat: Vec<T> = t.row(0).iter().chain(t.row(1).iter()).copied().collect();
    let gap = flat.iter().zip(&p.t).fold(T::zero(), |g, (x, y)| g.max((*x - *y).abs()));
    let regenerated = gen_planar_trajectory_pair(&PlanarTrajectoryParams { t: flat, ..p.clone() })?;
    Ok(gap
        .max(config_gap(&regenerated.reference, &pair.reference))
        .max(config_gap(&regenerated.equivalent, &pair.equivalent)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Rotation3;

    fn rot3(r: f64, p: f64, y: f64) -> DMatrix<f64> {
        let m = Rotation3::from_euler_angles(r, p, y).into_inner();
        DMatrix::from_iterator(3, 3, m.iter().copied())
    }

    #[test]
    fn rank2_2d_formula_inverts_the_alternative_system() {
        // n = T n⁰ with T = [[1, 0.8], [0, 0.6]]; build M from it by hand.
        let t = DMatrix::from_row_slice(2, 2, &[0.3, 0.8, 0.7, 0.6]);
        // cos φ = t00 cos φ⁰ + t01 sin φ⁰, sin φ = t10 cos φ⁰ + t11 sin φ⁰
        // ⇒ cos φ⁰ = (sin φ - t11 sin φ⁰) / t10, cos φ = t00/t10 sin φ + (t01 - t00 t11 / t10) sin φ⁰.
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[0.3 / 0.7, 0.8 - 0.3 * 0.6 / 0.7, 1.0 / 0.7, -0.6 / 0.7],
        );
        let back = rank2_2d_from_alternative(&m).unwrap();
        assert!(linalg::max_abs(&(back - t)) < 1e-12);
    }

    #[test]
    fn zero_pivots_redirect() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 0.3]);
        assert!(matches!(rank2_2d_from_alternative(&m), Err(Error::Redirect { target: ClassId::Rank1Corridor, .. })));
        let m3 = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.2, 0.0, 1.0, 0.1, 0.3, 0.2, 0.0]);
        assert!(matches!(
            rank3_3d_from_alternative(&m3),
            Err(Error::Redirect { target: ClassId::Rank4PlanarTrajectory, .. })
        ));
    }

    #[test]
    fn corridor_loop() {
        let p = CorridorParams {
            a: 0.7,
            offsets: vec![1.0, 2.0, -0.5],
            flips: vec![],
            waypoints0: vec![vec![0.2, 0.4], vec![-1.0, 0.3], vec![0.5, 2.0]],
            free_coords: Some(vec![3.0, -1.0, 0.25]),
        };
        assert!(check_rank1_2d(&p).unwrap() < 1e-9);
    }

    #[test]
    fn parallelogram_loop() {
        let p = ParallelogramParams {
            phi1: 0.0,
            phi3: std::f64::consts::FRAC_PI_2,
            d: 0.6,
            extra_parallel: vec![],
            offsets: vec![1.0, 1.0, 2.0, 0.5],
            waypoints: vec![vec![0.1, 0.2], vec![0.7, 0.4], vec![0.3, 0.9]],
            branch: 3,
        };
        for angle in [0.4, 1.9, -2.5] {
            assert!(check_rank2_2d(&p, angle).unwrap() < 1e-9);
        }
    }

    #[test]
    fn rank3_loop() {
        let p: Rank3MiscParams<f64> = serde_json::from_value(serde_json::json!({
            "t": [1.2, 0.1, 0.1, 1.1, 0.05, 0.9],
            "azimuths": [0.3, 1.2, 2.2, 3.3, 4.1, 5.0],
            "branches": [0, 0, 0, 0, 0, 0],
            "offsets": [1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            "waypoints0": [[0.1, 0.2, 0.3], [0.5, -0.2, 0.1], [-0.3, 0.4, -0.2], [0.2, 0.1, 0.6]]
        }))
        .unwrap();
        assert!(check_rank3_3d(&p, &rot3(0.3, -0.5, 1.2)).unwrap() < 1e-9);
    }
}
