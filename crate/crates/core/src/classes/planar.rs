//! The three ambiguity classes in the plane: corridors, parallelograms and
//! linear trajectories.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{expect_len, is_sign_diagonal, points, ClassId, GeneratedPair};
use crate::error::{Error, Result};
use crate::geometry::{Configuration, Plane};
use crate::scalar::Real;

/// Parameters of an infinitely long corridor (all walls parallel).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorridorParams<T> {
    /// Slope of the reference wall normals: `φ⁰ = atan a (+ π)`.
    pub a: T,
    /// One offset per wall; the wall count is taken from here.
    pub offsets: Vec<T>,
    /// Per-wall orientation flip (`φ⁰ = atan a + π`). Empty means
    /// alternating, starting unflipped.
    #[serde(default)]
    pub flips: Vec<bool>,
    pub waypoints0: Vec<Vec<T>>,
    /// Equivalent-room y-coordinates; defaults to the reference ones.
    #[serde(default)]
    pub free_coords: Option<Vec<T>>,
}

/// Parameters of the parallelogram class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelogramParams<T> {
    pub phi1: T,
    pub phi3: T,
    /// Free entry of the upper-triangular map `T = [[a, b], [0, d]]`.
    pub d: T,
    /// Extra copies of the base walls `φ1, φ1 + π, φ3, φ3 + π` (at most
    /// four counts, missing ones are zero).
    #[serde(default)]
    pub extra_parallel: Vec<usize>,
    pub offsets: Vec<T>,
    pub waypoints: Vec<Vec<T>>,
    /// Index into the valid `(a, b)` solutions sorted lexicographically.
    #[serde(default)]
    pub branch: usize,
}

/// Parameters of the collinear-trajectory class in 2D.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearTrajectory2dParams<T> {
    /// Reference wall angles `φ⁰_k` (arbitrary).
    pub wall_angles: Vec<T>,
    pub a: T,
    pub b: T,
    pub c: T,
    /// Per-wall `s_k ∈ {-1, 1}`; empty means all `+1`.
    #[serde(default)]
    pub signs: Vec<i8>,
    pub offsets: Vec<T>,
    /// Position of each waypoint along the trajectory line.
    pub gammas: Vec<T>,
}

fn unit2<T: Real>(phi: T) -> DVector<T> {
    DVector::from_vec(vec![phi.cos(), phi.sin()])
}

fn planes_from<T: Real>(normals: &[DVector<T>], offsets: &[T]) -> Result<Vec<Plane<T>>> {
    normals
        .iter()
        .zip(offsets)
        .map(|(n, &q)| Plane::from_direction(n.clone(), q))
        .collect()
}

fn sign_of(s: i8) -> Result<i8> {
    match s {
        1 | -1 => Ok(s),
        _ => Err(Error::invalid(format!("sign choices must be -1 or 1, got {s}"))),
    }
}

pub fn gen_corridor_pair<T: Real>(p: &CorridorParams<T>) -> Result<GeneratedPair<T>> {
    let k = p.offsets.len();
    if k < 2 {
        return Err(Error::invalid("a corridor needs at least two walls"));
    }
    let flips: Vec<bool> = if p.flips.is_empty() {
        (0..k).map(|i| i % 2 == 1).collect()
    } else {
        expect_len(&p.flips, k, "flips")?;
        p.flips.clone()
    };
    let r0 = points(2, &p.waypoints0, "waypoints0")?;
    let b = (p.a * p.a + T::one()).sqrt();
    let base = p.a.atan();

    let mut n0 = Vec::with_capacity(k);
    let mut n = Vec::with_capacity(k);
    for &flip in &flips {
        let shift = if flip { T::pi() } else { T::zero() };
        n0.push(unit2(base + shift));
        let sx = if flip { -T::one() } else { T::one() };
        n.push(DVector::from_vec(vec![sx, T::zero()]));
    }

    let ys: Vec<T> = match &p.free_coords {
        Some(ys) => {
            expect_len(ys, r0.len(), "free_coords")?;
            ys.clone()
        }
        None => r0.iter().map(|r| r[1]).collect(),
    };
    let r = r0
        .iter()
        .zip(&ys)
        .map(|(w, &y)| DVector::from_vec(vec![(w[0] + p.a * w[1]) / b, y]))
        .collect();

    Ok(GeneratedPair {
        class: ClassId::Rank1Corridor,
        reference: Configuration::new(2, planes_from(&n0, &p.offsets)?, r0)?,
        equivalent: Configuration::new(2, planes_from(&n, &p.offsets)?, r)?,
        transform: None,
        rotation: None,
    })
}

/// Valid `(a, b)` for given `φ1, φ3, d`, sorted lexicographically.
///
/// Each base wall gives `a cos φ + b sin φ = ±√(1 - d² sin² φ)`, so the sign
/// pairs yield up to four linear systems. Solutions that make `T` singular
/// or a pure reflection are discarded; the identity is kept.
pub fn parallelogram_branches<T: Real>(phi1: T, phi3: T, d: T) -> Result<Vec<(T, T)>> {
    let det = (phi3 - phi1).sin();
    if det.abs() <= T::tol(1e-9) {
        return Err(Error::invalid("phi1 and phi3 must not describe parallel walls"));
    }
    let mut roots = [T::zero(); 2];
    for (slot, (&phi, wall)) in roots.iter_mut().zip([phi1, phi3].iter().zip([0usize, 2])) {
        let s = phi.sin();
        let radicand = T::one() - d * d * s * s;
        if radicand < -T::tol(1e-12) {
            return Err(Error::infeasible(
                "(a cos φ + b sin φ)² + (d sin φ)² = 1",
                Some(wall),
                format!("1 - d² sin² φ = {:e} < 0", radicand.as_f64()),
            ));
        }
        *slot = radicand.max(T::zero()).sqrt();
    }
    let tol = T::tol(1e-10);
    let mut out: Vec<(T, T)> = Vec::new();
    for s1 in [-T::one(), T::one()] {
        for s3 in [-T::one(), T::one()] {
            let (r1, r3) = (s1 * roots[0], s3 * roots[1]);
            // [cos φ1  sin φ1; cos φ3  sin φ3] [a; b] = [r1; r3]
            let a = (r1 * phi3.sin() - r3 * phi1.sin()) / det;
            let b = (phi1.cos() * r3 - phi3.cos() * r1) / det;
            let t = DMatrix::from_row_slice(2, 2, &[a, b, T::zero(), d]);
            let identity = (a - T::one()).abs() <= tol && b.abs() <= tol && (d - T::one()).abs() <= tol;
            if a.abs() <= tol || (is_sign_diagonal(&t, tol) && !identity) {
                continue;
            }
            if out.iter().all(|&(x, y)| (x - a).abs() > tol || (y - b).abs() > tol) {
                out.push((a, b));
            }
        }
    }
    out.sort_by(|x, y| {
        x.0.partial_cmp(&y.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.1.partial_cmp(&y.1).unwrap_or(std::cmp::Ordering::Equal))
    });
    if out.is_empty() {
        return Err(Error::DegenerateClassParameters(
            "every solution for (a, b) is a reflection or singular".into(),
        ));
    }
    Ok(out)
}

/// Coefficients `(A, B, C)` of the quadratic in `cos 2φ⁰` satisfied by
/// reference angles of the parallelogram class.
pub fn parallelogram_quadratic<T: Real>(a: T, b: T, d: T) -> (T, T, T) {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let u = a * a - b * b - d * d;
    let v = a * a + b * b + d * d - two;
    (u * u + four * a * a * b * b, two * u * v, v * v - four * a * a * b * b)
}

/// Residual of `(a cos φ + b sin φ)² + (d sin φ)² = 1`.
pub fn parallelogram_residual<T: Real>(a: T, b: T, d: T, phi: T) -> T {
    let (s, c) = phi.sin_cos();
    let x = a * c + b * s;
    x * x + d * d * s * s - T::one()
}

/// Reference angles in `[0, 2π)` compatible with `T = [[a, b], [0, d]]`.
///
/// Solves the quadratic in `cos 2φ⁰`, expands each root into its four
/// angle candidates and keeps those whose residual is at most `1e-10`.
/// Generically four angles survive, in antipodal pairs.
pub fn parallelogram_reference_angles<T: Real>(a: T, b: T, d: T) -> Result<Vec<T>> {
    let (qa, qb, qc) = parallelogram_quadratic(a, b, d);
    if qa.abs() <= T::tol(1e-14) {
        return Err(Error::DegenerateClassParameters(
            "A = 0: T is a reflection and every angle is compatible".into(),
        ));
    }
    let disc = qb * qb - T::lit(4.0) * qa * qc;
    if disc < -T::tol(1e-12) {
        return Err(Error::infeasible("A cos²(2φ) + B cos(2φ) + C = 0", None, "negative discriminant"));
    }
    let root = disc.max(T::zero()).sqrt();
    let two_pi = T::two_pi();
    let mut angles: Vec<T> = Vec::new();
    for x in [(-qb + root) / (qa + qa), (-qb - root) / (qa + qa)] {
        let half = x.max(-T::one()).min(T::one()).acos() * T::lit(0.5);
        for base in [half, -half] {
            for shift in [T::zero(), T::pi()] {
                let mut phi = (base + shift) % two_pi;
                if phi < T::zero() {
                    phi += two_pi;
                }
                if parallelogram_residual(a, b, d, phi).abs() <= T::tol(1e-10)
                    && angles.iter().all(|&q| angle_gap(q, phi) > T::tol(1e-9))
                {
                    angles.push(phi);
                }
            }
        }
    }
    angles.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    Ok(angles)
}

fn angle_gap<T: Real>(x: T, y: T) -> T {
    let d = (x - y).abs() % T::two_pi();
    d.min(T::two_pi() - d)
}

pub fn gen_parallelogram_pair<T: Real>(p: &ParallelogramParams<T>) -> Result<GeneratedPair<T>> {
    if p.extra_parallel.len() > 4 {
        return Err(Error::invalid("extra_parallel has one count per base wall (at most four)"));
    }
    let branches = parallelogram_branches(p.phi1, p.phi3, p.d)?;
    let &(a, b) = branches.get(p.branch).ok_or_else(|| {
        Error::invalid(format!("branch {} out of range ({} valid solutions)", p.branch, branches.len()))
    })?;
    let t = DMatrix::from_row_slice(2, 2, &[a, b, T::zero(), p.d]);

    let base = [p.phi1, p.phi1 + T::pi(), p.phi3, p.phi3 + T::pi()];
    let mut angles: Vec<T> = base.to_vec();
    for (i, &count) in p.extra_parallel.iter().enumerate() {
        angles.extend(std::iter::repeat_n(base[i], count));
    }
    expect_len(&p.offsets, angles.len(), "offsets")?;

    let n0: Vec<DVector<T>> = angles.iter().map(|&phi| unit2(phi)).collect();
    let n: Vec<DVector<T>> = n0.iter().map(|v| &t * v).collect();
    let r0 = points(2, &p.waypoints, "waypoints")?;
    let t_inv_t = t
        .transpose()
        .try_inverse()
        .ok_or_else(|| Error::DegenerateClassParameters("T is singular".into()))?;
    let r = r0.iter().map(|w| &t_inv_t * w).collect();

    Ok(GeneratedPair {
        class: ClassId::Rank2Parallelogram,
        reference: Configuration::new(2, planes_from(&n0, &p.offsets)?, r0)?,
        equivalent: Configuration::new(2, planes_from(&n, &p.offsets)?, r)?,
        transform: Some(t),
        rotation: None,
    })
}

/// Equivalent wall angle of the linear-trajectory class:
/// `s acos((b cos φ⁰ + c sin φ⁰) / √(a² + 1)) - atan a`.
pub fn linear_trajectory_angle<T: Real>(phi0: T, a: T, b: T, c: T, sign: i8, wall: usize) -> Result<T> {
    let scale = (a * a + T::one()).sqrt();
    let ratio = (b * phi0.cos() + c * phi0.sin()) / scale;
    if ratio.abs() > T::one() + T::tol(1e-12) {
        return Err(Error::infeasible(
            "|b cos φ⁰ + c sin φ⁰| ≤ √(a² + 1)",
            Some(wall),
            format!("acos argument {:.6} outside [-1, 1]", ratio.as_f64()),
        ));
    }
    let s = if sign < 0 { -T::one() } else { T::one() };
    Ok(s * ratio.max(-T::one()).min(T::one()).acos() - a.atan())
}

pub fn gen_linear_trajectory_pair_2d<T: Real>(p: &LinearTrajectory2dParams<T>) -> Result<GeneratedPair<T>> {
    let k = p.wall_angles.len();
    if k == 0 {
        return Err(Error::invalid("at least one wall angle is required"));
    }
    expect_len(&p.offsets, k, "offsets")?;
    let signs: Vec<i8> = if p.signs.is_empty() {
        vec![1; k]
    } else {
        expect_len(&p.signs, k, "signs")?;
        p.signs.iter().map(|&s| sign_of(s)).collect::<Result<_>>()?
    };
    if p.gammas.is_empty() {
        return Err(Error::invalid("gammas: at least one waypoint is required"));
    }

    let mut n0 = Vec::with_capacity(k);
    let mut n = Vec::with_capacity(k);
    for (idx, (&phi0, &s)) in p.wall_angles.iter().zip(&signs).enumerate() {
        n0.push(unit2(phi0));
        n.push(unit2(linear_trajectory_angle(phi0, p.a, p.b, p.c, s, idx)?));
    }
    let r0 = p
        .gammas
        .iter()
        .map(|&g| DVector::from_vec(vec![-p.b * g, -p.c * g]))
        .collect();
    let r = p.gammas.iter().map(|&g| DVector::from_vec(vec![-g, p.a * g])).collect();

    Ok(GeneratedPair {
        class: ClassId::Rank3LinearTrajectory,
        reference: Configuration::new(2, planes_from(&n0, &p.offsets)?, r0)?,
        equivalent: Configuration::new(2, planes_from(&n, &p.offsets)?, r)?,
        transform: None,
        rotation: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{compute_ppdm, congruence_residual, lemma1_residual, room_congruence_residual};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn pair_is_sound(pair: &GeneratedPair<f64>) {
        let diff = compute_ppdm(&pair.reference)
            .max_abs_diff(&compute_ppdm(&pair.equivalent))
            .unwrap();
        assert!(diff <= 1e-9 * pair.reference.bounding_radius(), "PPDM diff {diff}");
        let (g, q) = lemma1_residual(&pair.reference, &pair.equivalent).unwrap();
        assert!(g <= 1e-9 && q <= 1e-9, "lemma residuals {g} {q}");
    }

    fn square_params(d: f64, branch: usize) -> ParallelogramParams<f64> {
        ParallelogramParams {
            phi1: 0.0,
            phi3: FRAC_PI_2,
            d,
            extra_parallel: vec![],
            offsets: vec![1.0, 1.0, 1.0, 1.0],
            waypoints: vec![vec![1.0, 1.0], vec![0.2, -0.3], vec![-0.5, 0.4]],
            branch,
        }
    }

    #[test]
    fn parallelogram_example_branch() {
        let branches = parallelogram_branches(0.0, FRAC_PI_2, 0.6).unwrap();
        assert_eq!(branches.len(), 4);
        let idx = branches
            .iter()
            .position(|&(a, b)| (a - 1.0).abs() < 1e-12 && (b - 0.8).abs() < 1e-12)
            .unwrap();
        let mut p = square_params(0.6, idx);
        p.waypoints = vec![vec![1.4, 1.4]];
        let pair = gen_parallelogram_pair(&p).unwrap();
        pair_is_sound(&pair);

        let eq_angles: Vec<f64> = pair
            .equivalent
            .planes()
            .iter()
            .map(|pl| pl.normal()[1].atan2(pl.normal()[0]))
            .collect();
        let expected = [0.0, PI, 0.75f64.atan(), 0.75f64.atan() - PI];
        for (got, want) in eq_angles.iter().zip(expected) {
            assert!(angle_gap(*got, want) < 1e-12, "{got} vs {want}");
        }
        // The equivalent waypoint (1, 1) comes from r⁰ = Tᵀ (1, 1) = (1, 1.4).
        let t = pair.transform.unwrap();
        let back = t.transpose() * DVector::from_vec(vec![1.0, 1.0]);
        assert_abs_diff_eq!(back[1], 1.4, epsilon = 1e-12);
        let n3 = pair.equivalent.planes()[2].normal();
        assert_abs_diff_eq!(n3[0] + n3[1], 1.4, epsilon = 1e-12);
    }

    #[test]
    fn parallelogram_identity_parameters() {
        let pair = gen_parallelogram_pair(&square_params(1.0, 0)).unwrap();
        assert_eq!(pair.transform.as_ref().unwrap()[(0, 0)], 1.0);
        assert!(congruence_residual(&pair.reference, &pair.equivalent).unwrap() < 1e-12);
    }

    #[test]
    fn parallelogram_reflection_only_is_rejected() {
        // With d = -1 the only non-singular solutions are reflections.
        assert!(matches!(
            gen_parallelogram_pair(&square_params(-1.0, 0)),
            Err(Error::DegenerateClassParameters(_))
        ));
    }

    #[test]
    fn parallelogram_sweep_is_distinct() {
        let pairs: Vec<_> = [0.4, 0.6, 0.8]
            .iter()
            .map(|&d| gen_parallelogram_pair(&square_params(d, 3)).unwrap())
            .collect();
        for p in &pairs {
            pair_is_sound(p);
            assert!(congruence_residual(&p.reference, &p.equivalent).unwrap() >= 1e-3);
        }
        for i in 0..3 {
            for j in i + 1..3 {
                let di = compute_ppdm(&pairs[i].equivalent);
                let dj = compute_ppdm(&pairs[j].equivalent);
                assert!(di.max_abs_diff(&dj).unwrap() < 1e-9);
                assert!(congruence_residual(&pairs[i].equivalent, &pairs[j].equivalent).unwrap() >= 1e-3);
            }
        }
    }

    #[test]
    fn parallelogram_reference_angles_are_antipodal_pairs() {
        let (a, b, d) = (1.0f64, 0.8, 0.6);
        let angles = parallelogram_reference_angles(a, b, d).unwrap();
        assert_eq!(angles.len(), 4);
        for &phi in &angles {
            assert!(parallelogram_residual(a, b, d, phi).abs() <= 1e-10);
            assert!(angles.iter().any(|&q| angle_gap(q, phi + PI) < 1e-9));
        }
        assert!(angles.iter().any(|&q| angle_gap(q, 0.0) < 1e-9));
        assert!(angles.iter().any(|&q| angle_gap(q, FRAC_PI_2) < 1e-9));
    }

    #[test]
    fn parallelogram_with_extra_walls() {
        let mut p = square_params(0.7, 2);
        p.phi3 = 1.2;
        p.extra_parallel = vec![1, 0, 2];
        p.offsets = vec![1.0, 2.0, 0.5, 1.5, 3.0, -1.0, 2.5];
        let pair = gen_parallelogram_pair(&p).unwrap();
        assert_eq!(pair.reference.n_walls(), 7);
        pair_is_sound(&pair);
        p.offsets.pop();
        assert!(gen_parallelogram_pair(&p).is_err());
    }

    #[test]
    fn corridor_examples() {
        let p = CorridorParams {
            a: 1.0,
            offsets: vec![2.0, 3.0],
            flips: vec![],
            waypoints0: vec![vec![1.0, 1.0]],
            free_coords: Some(vec![5.0]),
        };
        let pair = gen_corridor_pair(&p).unwrap();
        pair_is_sound(&pair);
        let r = &pair.equivalent.waypoints()[0];
        assert_abs_diff_eq!(r[0], 2f64.sqrt(), epsilon = 1e-12);
        assert_eq!(r[1], 5.0);
        let n0 = pair.reference.planes()[0].normal();
        assert_abs_diff_eq!(DVector::from_vec(vec![1.0, 1.0]).dot(n0), 2f64.sqrt(), epsilon = 1e-12);
        assert!(room_congruence_residual(&pair.reference, &pair.equivalent).unwrap() < 1e-9);

        let flat = CorridorParams {
            a: 0.0,
            offsets: vec![1.0, 1.0, 2.0],
            flips: vec![false, true, false],
            waypoints0: vec![vec![0.3, 0.0], vec![-0.2, 1.0]],
            free_coords: Some(vec![7.0, -4.0]),
        };
        let pair = gen_corridor_pair(&flat).unwrap();
        pair_is_sound(&pair);
        for (w0, w) in pair.reference.waypoints().iter().zip(pair.equivalent.waypoints()) {
            assert_abs_diff_eq!(w0[0], w[0], epsilon = 1e-15);
        }
    }

    #[test]
    fn linear_trajectory_identity() {
        let p = LinearTrajectory2dParams {
            wall_angles: vec![0.3, 1.4, 2.9, 0.0],
            a: 0.0,
            b: 1.0,
            c: 0.0,
            signs: vec![],
            offsets: vec![1.0, 2.0, 3.0, 4.0],
            gammas: vec![0.0, 1.0, 2.0],
        };
        let pair = gen_linear_trajectory_pair_2d(&p).unwrap();
        pair_is_sound(&pair);
        assert!(congruence_residual(&pair.reference, &pair.equivalent).unwrap() < 1e-12);
    }

    #[test]
    fn linear_trajectory_pentagon_and_degenerate_coefficients() {
        let p = LinearTrajectory2dParams {
            wall_angles: vec![0.1, 1.3, 2.5, 3.8, 5.1],
            a: 0.3,
            b: 0.9,
            c: 0.2,
            signs: vec![1, -1, 1, -1, 1],
            offsets: vec![2.0, 1.5, 2.2, 1.8, 2.4],
            gammas: vec![0.0, 1.0, 2.0],
        };
        let pair = gen_linear_trajectory_pair_2d(&p).unwrap();
        pair_is_sound(&pair);
        assert!(congruence_residual(&pair.reference, &pair.equivalent).unwrap() > 1e-3);

        let zero = LinearTrajectory2dParams { b: 0.0, c: 0.0, a: 0.5, ..p.clone() };
        let pair = gen_linear_trajectory_pair_2d(&zero).unwrap();
        for pl in pair.equivalent.planes() {
            let phi = pl.normal()[1].atan2(pl.normal()[0]);
            assert!(angle_gap(phi, FRAC_PI_2 - 0.5f64.atan()) < 1e-12 || angle_gap(phi, -FRAC_PI_2 - 0.5f64.atan()) < 1e-12);
        }

        let bad = LinearTrajectory2dParams { b: 3.0, c: 0.0, a: 0.0, ..p };
        match gen_linear_trajectory_pair_2d(&bad) {
            Err(Error::InfeasibleParameters { wall: Some(0), .. }) => {}
            other => panic!("expected infeasible wall 0, got {other:?}"),
        }
    }
}
