//! Deciding whether a configuration is determined by its PPDM.
//!
//! Two configurations share a PPDM exactly when their stacked waypoint and
//! normal matrices satisfy `R̄ᵀ N̄ = 0`. When the waypoints span the space,
//! this forces `n_k = T n⁰_k` for one linear map `T`, and the unit-norm
//! constraints `|T n⁰_k| = 1` are linear in `S = TᵀT`:
//! `n⁰_kᵀ S n⁰_k = 1`. `S = I` always solves them, so the room admits a
//! non-rigid partner exactly when this linear system has a nontrivial
//! nullspace. The classifier combines that test with the trajectory
//! degeneracies (collinear, coplanar) and names the matching classes.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classes::spatial::upper_t;
use crate::classes::{is_sign_diagonal, ClassId};
use crate::error::{Error, Result};
use crate::geometry::{room_congruence_residual, Configuration, Plane};
use crate::linalg;
use crate::scalar::Real;

/// Default relative tolerance for rank decisions.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Rank of the centred point matrix. Singular values at most
/// `tol × max(σ_max, 1, max |p|)` are treated as zero, so repeated points
/// give rank 0.
pub fn affine_rank<T: Real>(points: &[DVector<T>], tol: T) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let dim = points[0].len();
    let n = T::from_usize(points.len()).expect("count fits scalar");
    let mean = points.iter().fold(DVector::zeros(dim), |acc, p| acc + p) / n;
    let centred = DMatrix::from_columns(&points.iter().map(|p| p - &mean).collect::<Vec<_>>());
    let scale = points.iter().fold(T::one(), |m, p| m.max(p.norm()));
    linalg::rank_with(&centred, tol, tol * scale)
}

/// Shape of a set of wall normals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalStructure {
    pub rank: usize,
    /// Index pairs `(i, j)`, `i < j`, of parallel or antiparallel normals.
    pub parallel_pairs: Vec<(usize, usize)>,
    /// Walls grouped by direction up to sign, in order of first appearance.
    pub direction_classes: Vec<Vec<usize>>,
    /// For normals spanning a hyperplane: the unit direction orthogonal
    /// to all of them.
    pub common_direction: Option<Vec<f64>>,
}

/// `|sin|` of the angle between two unit vectors.
fn sine<T: Real>(a: &DVector<T>, b: &DVector<T>) -> T {
    if a.len() == 2 {
        (a[0] * b[1] - a[1] * b[0]).abs()
    } else {
        a.cross(b).norm()
    }
}

/// Rank of the normals, parallel pairs and direction classes.
///
/// Two walls count as parallel when the sine of the angle between their
/// normals is at most `tol`.
pub fn normal_structure<T: Real>(planes: &[Plane<T>], tol: T) -> NormalStructure {
    let normals: Vec<&DVector<T>> = planes.iter().map(|p| p.normal()).collect();
    let mat = DMatrix::from_columns(&normals.iter().map(|n| (*n).clone()).collect::<Vec<_>>());
    let rank = linalg::rank_with(&mat, tol, tol);

    let mut parallel_pairs = Vec::new();
    for i in 0..normals.len() {
        for j in i + 1..normals.len() {
            if sine(normals[i], normals[j]) <= tol {
                parallel_pairs.push((i, j));
            }
        }
    }
    let mut direction_classes: Vec<Vec<usize>> = Vec::new();
    for (k, n) in normals.iter().enumerate() {
        match direction_classes.iter_mut().find(|c| sine(normals[c[0]], n) <= tol) {
            Some(c) => c.push(k),
            None => direction_classes.push(vec![k]),
        }
    }

    let dim = mat.nrows();
    let common_direction = if rank + 1 == dim && !normals.is_empty() {
        let null = linalg::nullspace(&mat.transpose(), tol);
        (null.ncols() >= 1).then(|| {
            let mut v = null.column(0).into_owned();
            // Fix the sign so the largest component is positive.
            let imax = v.iamax();
            if v[imax] < T::zero() {
                v = -v;
            }
            v.iter().map(|x| x.as_f64()).collect()
        })
    } else {
        None
    };

    NormalStructure {
        rank,
        parallel_pairs,
        direction_classes,
        common_direction,
    }
}

/// Row of the unit-norm system `nᵀ S n = 1` in the unknowns of symmetric
/// `S`: `(n1², 2n1n2, n2²)` in 2D, `(n1², n2², n3², 2n1n2, 2n1n3, 2n2n3)`
/// in 3D.
pub fn s_system_row<T: Real>(n: &DVector<T>) -> Vec<T> {
    let two = T::lit(2.0);
    if n.len() == 2 {
        vec![n[0] * n[0], two * n[0] * n[1], n[1] * n[1]]
    } else {
        vec![
            n[0] * n[0],
            n[1] * n[1],
            n[2] * n[2],
            two * n[0] * n[1],
            two * n[0] * n[2],
            two * n[1] * n[2],
        ]
    }
}

/// Symmetric matrix from the unknown ordering of [`s_system_row`].
pub fn symmetric_from<T: Real>(dim: usize, s: &[T]) -> DMatrix<T> {
    if dim == 2 {
        DMatrix::from_row_slice(2, 2, &[s[0], s[1], s[1], s[2]])
    } else {
        DMatrix::from_row_slice(3, 3, &[s[0], s[3], s[4], s[3], s[1], s[5], s[4], s[5], s[2]])
    }
}

pub fn s_system_matrix<T: Real>(dim: usize, normals: &[DVector<T>]) -> DMatrix<T> {
    let cols = dim * (dim + 1) / 2;
    let mut l = DMatrix::zeros(normals.len(), cols);
    for (k, n) in normals.iter().enumerate() {
        for (j, v) in s_system_row(n).into_iter().enumerate() {
            l[(k, j)] = v;
        }
    }
    l
}

/// Rank analysis of the unit-norm system of a room.
#[derive(Debug, Clone)]
pub struct SSystem<T: Real> {
    pub rank: usize,
    /// `m(m+1)/2 - rank`: the number of independent non-rigid deformations.
    pub nullity: usize,
    /// Smallest singular value relative to the largest.
    pub relative_gap: T,
    /// Orthonormal nullspace basis, one symmetric direction per column.
    pub nullspace: DMatrix<T>,
}

pub fn s_system<T: Real>(dim: usize, normals: &[DVector<T>], tol: T) -> SSystem<T> {
    let l = s_system_matrix(dim, normals);
    let cols = l.ncols();
    let rank = linalg::rank(&l, tol);
    let sv = linalg::singular_values(&l);
    let mut full = sv.clone();
    full.resize(cols, T::zero());
    let largest = full.first().copied().unwrap_or(T::zero());
    let smallest = full.last().copied().unwrap_or(T::zero());
    let relative_gap = if largest > T::zero() { smallest / largest } else { T::zero() };
    SSystem {
        rank,
        nullity: cols - rank,
        relative_gap,
        nullspace: linalg::nullspace(&l, tol),
    }
}

/// A non-rigid partner of `config` sharing its PPDM, built from the first
/// nullspace direction `Z` of the unit-norm system: `S = I + tZ` with `t`
/// small enough that `S` stays positive definite, `T` its Cholesky factor,
/// `n = T n⁰` and `r = T⁻ᵀ r⁰`. Returns `None` when the system has full rank.
pub fn equivalent_witness<T: Real>(config: &Configuration<T>, tol: T) -> Option<(DMatrix<T>, Configuration<T>)> {
    let dim = config.dim();
    let normals: Vec<DVector<T>> = config.planes().iter().map(|p| p.normal().clone()).collect();
    let sys = s_system(dim, &normals, tol);
    if sys.nullity == 0 || sys.nullspace.ncols() == 0 {
        return None;
    }
    let z = symmetric_from(dim, sys.nullspace.column(0).as_slice());
    let spread = z.clone().symmetric_eigenvalues().amax();
    let t = T::lit(0.5) / spread.max(T::tol(1e-12));
    let s = DMatrix::identity(dim, dim) + z * t;
    let tmat = linalg::upper_cholesky(&s)?;
    let tit = tmat.transpose().try_inverse()?;
    let planes = config
        .planes()
        .iter()
        .map(|p| Plane::from_direction(&tmat * p.normal(), p.offset()))
        .collect::<Result<Vec<_>>>()
        .ok()?;
    let waypoints = config.waypoints().iter().map(|r| &tit * r).collect();
    let partner = Configuration::new(dim, planes, waypoints).ok()?;
    Some((tmat, partner))
}

/// A matched class with the numbers that triggered it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMatch {
    pub class: ClassId,
    pub evidence: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Unique,
    Ambiguous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub matched_classes: Vec<ClassMatch>,
    pub waypoint_affine_rank: usize,
    pub normal_rank: usize,
    pub details: BTreeMap<String, f64>,
}

impl ClassificationReport {
    pub fn classes(&self) -> Vec<ClassId> {
        self.matched_classes.iter().map(|m| m.class).collect()
    }

    pub fn matches(&self, class: ClassId) -> bool {
        self.matched_classes.iter().any(|m| m.class == class)
    }
}

/// Whether the normals can be split into two groups, each orthogonal to a
/// common line (two planes through the origin cover them).
fn covered_by_two_planes<T: Real>(normals: &[DVector<T>], tol: T) -> bool {
    let k = normals.len();
    let fits = |subset: &[&DVector<T>]| {
        if subset.len() <= 2 {
            return true;
        }
        let m = DMatrix::from_columns(&subset.iter().map(|n| (*n).clone()).collect::<Vec<_>>());
        linalg::rank_with(&m, tol, tol) <= 2
    };
    let mut candidates: Vec<DVector<T>> = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let c = normals[i].cross(&normals[j]);
            let len = c.norm();
            if len > tol.sqrt() {
                candidates.push(c / len);
            }
        }
    }
    candidates.iter().any(|axis| {
        let rest: Vec<&DVector<T>> = normals.iter().filter(|n| axis.dot(n).abs() > tol.sqrt()).collect();
        fits(&rest)
    })
}

/// Decides uniqueness by matching the configuration against every ambiguity class.
///
/// Labels, with `m` the dimension:
/// * 2D: collinear waypoints → `Rank3LinearTrajectory`; one normal direction
///   → `Rank1Corridor`; two normal directions up to sign →
///   `Rank2Parallelogram`.
/// * 3D: `K < 6` → `TooFewWalls`; collinear waypoints →
///   `Rank5LinearTrajectory` (and `Rank4PlanarTrajectory`); coplanar
///   waypoints → `Rank4PlanarTrajectory`; normal rank 1 →
///   `Rank1Corridor3D`; normal rank 2 → `Rank2Prism`, plus
///   `Rank2Parallelepiped` with at most two directions; normal rank 3 with
///   the normals on two planes through the origin → `Rank3TwoParallelSets`;
///   normal rank 3 with a rank-deficient unit-norm system → `Rank3Misc`.
pub fn classify<T: Real>(config: &Configuration<T>, tol: T) -> Result<ClassificationReport> {
    let dim = config.dim();
    if dim != 2 && dim != 3 {
        return Err(Error::invalid(format!("dimension must be 2 or 3, got {dim}")));
    }
    let normals: Vec<DVector<T>> = config.planes().iter().map(|p| p.normal().clone()).collect();
    let structure = normal_structure(config.planes(), tol);
    let affine = affine_rank(config.waypoints(), tol);
    let sys = s_system(dim, &normals, tol);
    let k = config.n_walls();

    let mut details = BTreeMap::new();
    details.insert("walls".to_string(), k as f64);
    details.insert("waypoints".to_string(), config.n_waypoints() as f64);
    details.insert("direction_classes".to_string(), structure.direction_classes.len() as f64);
    details.insert("s_system_rank".to_string(), sys.rank as f64);
    details.insert("s_system_nullity".to_string(), sys.nullity as f64);
    details.insert("s_system_relative_gap".to_string(), sys.relative_gap.as_f64());
    let sv = linalg::singular_values(&DMatrix::from_columns(
        &config.waypoints().iter().map(|r| r - &config.waypoints()[0]).collect::<Vec<_>>(),
    ));
    if let (Some(&hi), Some(&lo)) = (sv.first(), sv.get(dim - 1)) {
        details.insert(
            "waypoint_relative_gap".to_string(),
            if hi > T::zero() { (lo / hi).as_f64() } else { 0.0 },
        );
    }

    let mut matched = Vec::new();
    let mut push = |class: ClassId, pairs: &[(&str, f64)]| {
        matched.push(ClassMatch {
            class,
            evidence: pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        });
    };
    let n_dirs = structure.direction_classes.len();
    let aff = affine as f64;
    let nrank = structure.rank as f64;

    if dim == 2 {
        if structure.rank <= 1 {
            push(ClassId::Rank1Corridor, &[("normal_rank", nrank)]);
        } else if n_dirs == 2 {
            push(
                ClassId::Rank2Parallelogram,
                &[("direction_classes", n_dirs as f64), ("s_system_nullity", sys.nullity as f64)],
            );
        }
        if affine <= 1 {
            push(ClassId::Rank3LinearTrajectory, &[("affine_rank", aff)]);
        }
    } else {
        if k < 6 {
            push(ClassId::TooFewWalls, &[("walls", k as f64)]);
        }
        match structure.rank {
            0 | 1 => push(ClassId::Rank1Corridor3D, &[("normal_rank", nrank)]),
            2 => {
                if n_dirs <= 2 {
                    push(ClassId::Rank2Parallelepiped, &[("direction_classes", n_dirs as f64)]);
                }
                push(ClassId::Rank2Prism, &[("normal_rank", nrank)]);
            }
            _ => {
                if covered_by_two_planes(&normals, tol) {
                    push(ClassId::Rank3TwoParallelSets, &[("normal_rank", nrank)]);
                }
                if sys.nullity >= 1 {
                    let witness = equivalent_witness(config, tol)
                        .map(|(t, _)| linalg::max_abs(&(t.transpose() * &t - DMatrix::identity(3, 3))).as_f64())
                        .unwrap_or(f64::NAN);
                    push(
                        ClassId::Rank3Misc,
                        &[
                            ("s_system_nullity", sys.nullity as f64),
                            ("s_system_relative_gap", sys.relative_gap.as_f64()),
                            ("witness_deformation", witness),
                        ],
                    );
                }
            }
        }
        if affine <= 2 {
            push(ClassId::Rank4PlanarTrajectory, &[("affine_rank", aff)]);
        }
        if affine <= 1 {
            push(ClassId::Rank5LinearTrajectory, &[("affine_rank", aff)]);
        }
    }

    Ok(ClassificationReport {
        verdict: if matched.is_empty() {
            Verdict::Unique
        } else {
            Verdict::Ambiguous
        },
        matched_classes: matched,
        waypoint_affine_rank: affine,
        normal_rank: structure.rank,
        details,
    })
}

/// Outcome of the multi-start search for a non-rigid rank-3 map.
#[derive(Debug, Clone)]
pub struct Rank3Solution<T: Real> {
    /// `(a, b, c, e, f, i)`.
    pub params: [T; 6],
    pub residual: T,
    /// Reference room mapped by `T`, waypoints by `T⁻ᵀ`.
    pub equivalent: Configuration<T>,
    pub restart: usize,
}

/// Best non-trivial residual seen by [`rank3_feasibility_solve`].
#[derive(Debug, Clone)]
pub struct Rank3Search<T: Real> {
    pub solution: Option<Rank3Solution<T>>,
    /// Smallest residual over restarts that did not end at a rigid map
    /// (`None` if every restart collapsed onto one).
    pub best_nontrivial_residual: Option<T>,
    pub restarts: usize,
}

/// Multi-start Levenberg–Marquardt search for an upper-triangular `T` with
/// `|T n_k| = 1` for every wall, excluding rigid solutions.
///
/// Restart `j` draws its starting point from the ChaCha8 stream `j` of
/// `seed`, so results do not depend on evaluation order. A restart counts
/// as trivial when its end point satisfies `‖TᵀT - I‖ ≤ 1e-6`. The first
/// non-trivial restart with residual at most `tol` whose induced room is
/// not congruent to the original is returned.
pub fn rank3_feasibility_solve<T: Real>(config: &Configuration<T>, restarts: usize, tol: T, seed: u64) -> Result<Rank3Search<T>> {
    if config.dim() != 3 {
        return Err(Error::invalid("the rank-3 feasibility search needs a 3D configuration"));
    }
    let normals: Vec<DVector<T>> = config.planes().iter().map(|p| p.normal().clone()).collect();
    let k = normals.len();
    let mut best: Option<T> = None;
    for restart in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(restart as u64);
        let mut x0 = DVector::from_vec(vec![T::one(), T::zero(), T::zero(), T::one(), T::zero(), T::one()]);
        for v in x0.iter_mut() {
            *v += T::lit(rng.gen_range(-0.8..0.8));
        }
        let report = linalg::levenberg_marquardt(
            |x: &DVector<T>| {
                let t = upper_t(x.as_slice());
                let mut r = DVector::zeros(k);
                let mut jac = DMatrix::zeros(k, 6);
                for (row, n) in normals.iter().enumerate() {
                    let tn = &t * n;
                    r[row] = tn.norm_squared() - T::one();
                    let two = T::lit(2.0);
                    let grad = [
                        two * tn[0] * n[0],
                        two * tn[0] * n[1],
                        two * tn[0] * n[2],
                        two * tn[1] * n[1],
                        two * tn[1] * n[2],
                        two * tn[2] * n[2],
                    ];
                    for (j, g) in grad.into_iter().enumerate() {
                        jac[(row, j)] = g;
                    }
                }
                (r, jac)
            },
            x0,
            300,
            T::tol(1e-14),
        );
        let t = upper_t(report.x.as_slice());
        let deformation = linalg::max_abs(&(t.transpose() * &t - DMatrix::identity(3, 3)));
        if deformation <= T::lit(1e-6) || is_sign_diagonal(&t, T::lit(1e-6)) {
            continue;
        }
        best = Some(best.map_or(report.max_residual, |b: T| b.min(report.max_residual)));
        if report.max_residual > tol {
            continue;
        }
        let Some(tit) = t.transpose().try_inverse() else {
            continue;
        };
        let planes = config
            .planes()
            .iter()
            .map(|p| Plane::from_direction(&t * p.normal(), p.offset()))
            .collect::<Result<Vec<_>>>()?;
        let waypoints = config.waypoints().iter().map(|r| &tit * r).collect();
        let equivalent = Configuration::new(3, planes, waypoints)?;
        if room_congruence_residual(config, &equivalent)? <= T::lit(1e-6) {
            continue;
        }
        let x = report.x;
        return Ok(Rank3Search {
            solution: Some(Rank3Solution {
                params: [x[0], x[1], x[2], x[3], x[4], x[5]],
                residual: report.max_residual,
                equivalent,
                restart,
            }),
            best_nontrivial_residual: best,
            restarts: restart + 1,
        });
    }
    Ok(Rank3Search {
        solution: None,
        best_nontrivial_residual: best,
        restarts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{apply_rigid_motion, compute_ppdm, RigidMotion};

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    fn plane(n: &[f64], q: f64) -> Plane<f64> {
        Plane::from_direction(v(n), q).unwrap()
    }

    #[test]
    fn affine_rank_examples() {
        assert_eq!(affine_rank(&[v(&[0.0, 0.0]), v(&[1.0, 1.0]), v(&[2.0, 2.0])], 1e-9), 1);
        assert_eq!(affine_rank(&[v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])], 1e-9), 2);
        let coplanar = [v(&[0.0, 0.0, 0.0]), v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0]), v(&[0.3, 0.7, 0.0])];
        assert_eq!(affine_rank(&coplanar, 1e-9), 2);
        assert_eq!(affine_rank(&[v(&[1.0, 2.0]), v(&[1.0, 2.0])], 1e-9), 0);
    }

    #[test]
    fn normal_structure_examples() {
        let square = [plane(&[1.0, 0.0], 1.0), plane(&[-1.0, 0.0], 0.0), plane(&[0.0, 1.0], 1.0), plane(&[0.0, -1.0], 0.0)];
        let s = normal_structure(&square, 1e-9);
        assert_eq!(s.rank, 2);
        assert_eq!(s.parallel_pairs, vec![(0, 1), (2, 3)]);

        let corridor = [plane(&[1.0, 0.0], 1.0), plane(&[-1.0, 0.0], 0.0)];
        assert_eq!(normal_structure(&corridor, 1e-9).rank, 1);

        let prism = [
            plane(&[1.0, 0.0, 0.0], 1.0),
            plane(&[0.0, 1.0, 0.0], 1.0),
            plane(&[-1.0, -1.0, 0.0], 1.0),
        ];
        let s = normal_structure(&prism, 1e-9);
        assert_eq!(s.rank, 2);
        let dir = s.common_direction.unwrap();
        assert!((dir[2] - 1.0).abs() < 1e-12 && dir[0].abs() < 1e-12);
    }

    fn cube_room(waypoints: Vec<DVector<f64>>) -> Configuration<f64> {
        let mut planes = Vec::new();
        for axis in 0..3 {
            let mut n = [0.0; 3];
            n[axis] = 1.0;
            planes.push(plane(&n, 1.0));
            n[axis] = -1.0;
            planes.push(plane(&n, 1.0));
        }
        Configuration::new(3, planes, waypoints).unwrap()
    }

    fn tetra_points() -> Vec<DVector<f64>> {
        vec![v(&[0.1, 0.2, 0.3]), v(&[0.5, -0.2, 0.1]), v(&[-0.3, 0.4, -0.2]), v(&[0.2, 0.1, 0.6])]
    }

    #[test]
    fn square_room_is_a_parallelogram() {
        let planes = vec![plane(&[1.0, 0.0], 1.0), plane(&[-1.0, 0.0], 0.0), plane(&[0.0, 1.0], 1.0), plane(&[0.0, -1.0], 0.0)];
        let c = Configuration::new(2, planes, vec![v(&[0.2, 0.3]), v(&[0.6, 0.1]), v(&[0.4, 0.8])]).unwrap();
        let r = classify(&c, 1e-8).unwrap();
        assert_eq!(r.verdict, Verdict::Ambiguous);
        assert_eq!(r.classes(), vec![ClassId::Rank2Parallelogram]);
    }

    #[test]
    fn generic_pentagon_is_unique() {
        let planes = [0.1, 1.4, 2.6, 3.9, 5.2]
            .iter()
            .map(|&phi: &f64| Plane::from_angle(phi, 2.0))
            .collect();
        let c = Configuration::new(2, planes, vec![v(&[0.2, 0.3]), v(&[0.6, 0.1]), v(&[0.4, 0.8])]).unwrap();
        let r = classify(&c, 1e-8).unwrap();
        assert_eq!(r.verdict, Verdict::Unique, "{:?}", r.matched_classes);
    }

    #[test]
    fn five_walls_in_3d_are_too_few() {
        let mut c = cube_room(tetra_points());
        let planes = c.planes()[..5].to_vec();
        c = c.with_planes(planes).unwrap();
        let r = classify(&c, 1e-8).unwrap();
        assert!(r.matches(ClassId::TooFewWalls));
        assert_eq!(r.verdict, Verdict::Ambiguous);
    }

    #[test]
    fn shoebox_is_ambiguous_and_solver_finds_t() {
        let c = cube_room(tetra_points());
        let r = classify(&c, 1e-8).unwrap();
        assert!(r.matches(ClassId::Rank3Misc));
        let search = rank3_feasibility_solve(&c, 32, 1e-10, 11).unwrap();
        let sol = search.solution.expect("shoebox admits a non-rigid T");
        let d0 = compute_ppdm(&c);
        let d1 = compute_ppdm(&sol.equivalent);
        assert!(d0.max_abs_diff(&d1).unwrap() <= 1e-6);
    }

    #[test]
    fn generic_six_walls_are_unique_and_solver_finds_nothing() {
        let walls = [(0.3, 0.2), (1.1, 1.9), (2.0, 3.1), (0.9, 4.4), (2.6, 5.5), (1.6, 0.7)];
        let planes = walls
            .iter()
            .map(|&(th, ph): &(f64, f64)| Plane::from_spherical(th, ph, 1.0))
            .collect();
        let c = Configuration::new(3, planes, tetra_points()).unwrap();
        let r = classify(&c, 1e-8).unwrap();
        assert_eq!(r.verdict, Verdict::Unique, "{:?}", r.matched_classes);
        let search = rank3_feasibility_solve(&c, 32, 1e-10, 3).unwrap();
        assert!(search.solution.is_none());
        if let Some(best) = search.best_nontrivial_residual {
            assert!(best > 1e-3, "best residual {best}");
        }
    }

    #[test]
    fn witness_has_the_same_ppdm() {
        let c = cube_room(tetra_points());
        let (t, partner) = equivalent_witness(&c, 1e-8).unwrap();
        assert!(linalg::max_abs(&(t.transpose() * &t - DMatrix::identity(3, 3))) > 1e-3);
        let diff = compute_ppdm(&c).max_abs_diff(&compute_ppdm(&partner)).unwrap();
        assert!(diff < 1e-12);
    }

    #[test]
    fn classification_is_invariant_under_rigid_motion() {
        let c = cube_room(tetra_points());
        let q = nalgebra::Rotation3::from_euler_angles(0.3, -0.7, 1.1).into_inner();
        let g = RigidMotion::new(DMatrix::from_iterator(3, 3, q.iter().copied()), v(&[1.0, -2.0, 0.5])).unwrap();
        let moved = apply_rigid_motion(&c, &g).unwrap();
        let a = classify(&c, 1e-8).unwrap();
        let b = classify(&moved, 1e-8).unwrap();
        assert_eq!(a.verdict, b.verdict);
        assert_eq!(a.classes(), b.classes());
    }
}
