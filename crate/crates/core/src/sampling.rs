//! Seeded random draws: feasible class parameters and generic configurations.
//!
//! All randomness comes from ChaCha8 seeded with a single `u64`. Independent
//! tasks use separate streams of the same seed (see [`stream_rng`]), so a
//! draw never depends on how many values another task consumed.
//!
//! Class parameters are drawn as JSON objects so that the same code fills
//! in missing fields of user-supplied parameters on the command line.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::classes::planar::parallelogram_branches;
use crate::classes::spatial::{parallelepiped_branches, prismatic_normal, two_sets_discriminant};
use crate::classes::{ClassId, ClassSpec, GeneratedPair};
use crate::error::{Error, Result};
use crate::geometry::{Configuration, Plane};
use crate::linalg;
use crate::scalar::Real;
use crate::uniqueness::{affine_rank, s_system};

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn u<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

fn signed<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let x = u(rng, lo, hi);
    if rng.gen_bool(0.5) {
        x
    } else {
        -x
    }
}

fn sign<R: Rng>(rng: &mut R) -> i8 {
    if rng.gen_bool(0.5) {
        1
    } else {
        -1
    }
}

fn values<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| u(rng, lo, hi)).collect()
}

fn offsets<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    values(rng, k, -2.5, 2.5)
}

/// Points in `[-r, r]^dim` whose centred matrix is well conditioned
/// (affine rank `min(n - 1, dim)`).
fn spread_points<R: Rng>(rng: &mut R, n: usize, dim: usize, r: f64) -> Vec<Vec<f64>> {
    loop {
        let pts: Vec<Vec<f64>> = (0..n).map(|_| values(rng, dim, -r, r)).collect();
        if points_conditioning(&pts, dim) >= 0.05 {
            return pts;
        }
    }
}

/// Smallest over largest relevant singular value of the centred points.
fn points_conditioning(pts: &[Vec<f64>], dim: usize) -> f64 {
    let n = pts.len();
    if n < 2 {
        return 1.0;
    }
    let mean: Vec<f64> = (0..dim).map(|j| pts.iter().map(|p| p[j]).sum::<f64>() / n as f64).collect();
    let m = DMatrix::from_fn(dim, n, |i, j| pts[j][i] - mean[i]);
    let sv = linalg::singular_values(&m);
    let want = (n - 1).min(dim);
    if sv[0] <= 0.0 {
        return 0.0;
    }
    sv[want - 1] / sv[0]
}

/// Distinct positions along a line, at least `gap` apart.
fn line_positions<R: Rng>(rng: &mut R, n: usize, gap: f64) -> Vec<f64> {
    loop {
        let mut g = values(rng, n, -2.0, 2.0);
        g.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if g.windows(2).all(|w| w[1] - w[0] >= gap) {
            g.shuffle(rng);
            return g;
        }
    }
}

fn wall_count<R: Rng>(rng: &mut R, lo: usize, hi: usize) -> usize {
    rng.gen_range(lo..=hi)
}

fn random_walls<R: Rng>(rng: &mut R, k: usize) -> Vec<(f64, f64)> {
    (0..k).map(|_| ((u(rng, -1.0, 1.0)).acos(), u(rng, 0.0, TAU))).collect()
}

/// One random parameter object for `class`, constructed to be away from the
/// identity map. It can still be infeasible; [`sample_pair`] retries.
pub fn draw_params<R: Rng>(class: ClassId, rng: &mut R) -> Result<Value> {
    let v = match class {
        ClassId::Rank1Corridor => {
            let k = wall_count(rng, 2, 5);
            let n = wall_count(rng, 3, 5);
            json!({
                "a": u(rng, -2.0, 2.0),
                "offsets": offsets(rng, k),
                "flips": (0..k).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>(),
                "waypoints0": spread_points(rng, n, 2, 2.0),
                "free_coords": values(rng, n, -2.0, 2.0),
            })
        }
        ClassId::Rank2Parallelogram => {
            let phi1 = u(rng, 0.0, TAU);
            let phi3 = phi1 + u(rng, 0.35, PI - 0.35);
            let d = if rng.gen_bool(0.5) { u(rng, 0.3, 0.85) } else { u(rng, 1.15, 1.6) };
            let branches = parallelogram_branches(phi1, phi3, d).unwrap_or_default();
            if branches.is_empty() {
                return Err(Error::infeasible("parallelogram branches", None, "no valid (a, b)"));
            }
            let extra: Vec<usize> = (0..4).map(|_| usize::from(rng.gen_bool(0.25))).collect();
            let k = 4 + extra.iter().sum::<usize>();
            let n = wall_count(rng, 3, 5);
            json!({
                "phi1": phi1, "phi3": phi3, "d": d,
                "extra_parallel": extra,
                "offsets": offsets(rng, k),
                "waypoints": spread_points(rng, n, 2, 2.0),
                "branch": rng.gen_range(0..branches.len()),
            })
        }
        ClassId::Rank3LinearTrajectory => {
            let k = wall_count(rng, 3, 6);
            let a = u(rng, -1.5, 1.5);
            let rho = u(rng, 0.2, 1.0) * (a * a + 1.0).sqrt();
            let ang = u(rng, 0.0, TAU);
            let (b, c) = (rho * ang.cos(), rho * ang.sin());
            if a.abs() + (b - 1.0).abs() + c.abs() < 0.1 {
                return Err(Error::DegenerateClassParameters("too close to the identity".into()));
            }
            let n = wall_count(rng, 2, 4);
            json!({
                "wall_angles": values(rng, k, 0.0, TAU),
                "a": a, "b": b, "c": c,
                "signs": (0..k).map(|_| sign(rng)).collect::<Vec<_>>(),
                "offsets": offsets(rng, k),
                "gammas": line_positions(rng, n, 0.2),
            })
        }
        ClassId::Rank1Corridor3D => {
            let k = wall_count(rng, 2, 5);
            let n = wall_count(rng, 3, 5);
            json!({
                "a": u(rng, -1.5, 1.5),
                "b": u(rng, -1.5, 1.5),
                "offsets": offsets(rng, k),
                "flips": (0..k).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>(),
                "waypoints0": spread_points(rng, n, 3, 2.0),
                "free_yz": (0..n).map(|_| (u(rng, -2.0, 2.0), u(rng, -2.0, 2.0))).collect::<Vec<_>>(),
            })
        }
        ClassId::Rank2Parallelepiped => {
            let (a, b) = (u(rng, -0.8, 0.8), u(rng, -0.8, 0.8));
            let phi1 = u(rng, 0.0, TAU);
            let phi3 = phi1 + u(rng, 0.35, PI - 0.35);
            let f = if rng.gen_bool(0.5) { u(rng, 0.4, 0.85) } else { u(rng, 1.15, 1.6) };
            let branches = parallelepiped_branches(a, b, phi1, phi3, f).unwrap_or_default();
            let usable: Vec<usize> = branches
                .iter()
                .enumerate()
                .filter(|(_, &(c, d))| {
                    let m = DMatrix::from_row_slice(3, 3, &[c, d, 0.0, 0.0, f, 0.0, 0.0, 0.0, 0.0]);
                    [phi1, phi3].iter().any(|&phi| {
                        let n = prismatic_normal(a, b, phi);
                        (&m * &n - &n).amax() > 0.05
                    })
                })
                .map(|(i, _)| i)
                .collect();
            let Some(&branch) = usable.choose(rng) else {
                return Err(Error::infeasible("parallelepiped branches", None, "no usable (c, d)"));
            };
            let extra: Vec<usize> = (0..4).map(|_| usize::from(rng.gen_bool(0.25))).collect();
            let k = 4 + extra.iter().sum::<usize>();
            let n = wall_count(rng, 3, 5);
            json!({
                "a": a, "b": b, "phi1": phi1, "phi3": phi3, "f": f,
                "extra_parallel": extra,
                "offsets": offsets(rng, k),
                "waypoints0": spread_points(rng, n, 3, 2.0),
                "free_z": values(rng, n, -2.0, 2.0),
                "branch": branch,
            })
        }
        ClassId::Rank2Prism => {
            let k = wall_count(rng, 3, 6);
            let n = wall_count(rng, 3, 5);
            let slide = loop {
                let s = values(rng, n, -1.5, 1.5);
                let (lo, hi) = s.iter().fold((f64::MAX, f64::MIN), |(l, h), &x| (l.min(x), h.max(x)));
                if hi - lo >= 0.3 {
                    break s;
                }
            };
            json!({
                "a": u(rng, -1.0, 1.0),
                "b": u(rng, -1.0, 1.0),
                "signs": (0..3).map(|_| sign(rng)).collect::<Vec<_>>(),
                "azimuths": values(rng, k, 0.0, TAU),
                "offsets": offsets(rng, k),
                "waypoints0": spread_points(rng, n, 3, 2.0),
                "slide": slide,
            })
        }
        ClassId::Rank3Misc => {
            let t = rank3_map(rng);
            let alpha = rng.gen_range(1..=4usize);
            let m = match alpha {
                1 => wall_count(rng, 4, 8),
                2 => wall_count(rng, 3, 4),
                _ => wall_count(rng, 2, 3),
            };
            let n = wall_count(rng, 4, 6);
            json!({
                "alpha": alpha,
                "t": t,
                "azimuths": values(rng, m, 0.0, TAU),
                "branches": (0..m).map(|_| rng.gen_range(0..4usize)).collect::<Vec<_>>(),
                "offsets": offsets(rng, alpha * m),
                "waypoints0": spread_points(rng, n, 3, 2.0),
            })
        }
        ClassId::Rank3TwoParallelSets => {
            let a = if rng.gen_bool(0.5) { signed(rng, 0.3, 0.8) } else { signed(rng, 1.25, 2.0) };
            let e = signed(rng, 0.3, 1.5);
            let b = u(rng, -2.0, 2.0);
            if two_sets_discriminant(a, b, e) < 0.05 {
                return Err(Error::infeasible("two-sets discriminant", None, "negative"));
            }
            let k = wall_count(rng, 4, 8);
            let mut sets: Vec<usize> = (0..k).map(|j| if j % 2 == 0 { rng.gen_range(0..2) } else { rng.gen_range(2..4) }).collect();
            sets.shuffle(rng);
            let n = wall_count(rng, 4, 6);
            json!({
                "a": a, "b": b, "e": e,
                "i_sign": sign(rng),
                "inclinations": values(rng, k, 0.15, PI - 0.15),
                "set_assignment": sets,
                "offsets": offsets(rng, k),
                "waypoints0": spread_points(rng, n, 3, 2.0),
            })
        }
        ClassId::Rank4PlanarTrajectory => {
            let k = wall_count(rng, 6, 8);
            let mut t = vec![1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0];
            for x in t.iter_mut() {
                *x += u(rng, -0.35, 0.35);
            }
            let n = wall_count(rng, 3, 5);
            let gammas = spread_points(rng, n, 2, 2.0);
            json!({
                "reference_walls": random_walls(rng, k),
                "t": t,
                "offsets": offsets(rng, k),
                "gammas": gammas.iter().map(|g| (g[0], g[1])).collect::<Vec<_>>(),
            })
        }
        ClassId::Rank5LinearTrajectory => {
            let k = wall_count(rng, 6, 8);
            let dir = loop {
                let v = values(rng, 3, -1.0, 1.0);
                let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if (0.2..=1.0).contains(&len) {
                    let r = u(rng, 0.3, 1.0) / len;
                    break v.iter().map(|x| x * r).collect::<Vec<_>>();
                }
            };
            let n = wall_count(rng, 2, 4);
            json!({
                "reference_walls": random_walls(rng, k),
                "equivalent_azimuths": values(rng, k, 0.0, TAU),
                "t": [u(rng, -1.0, 1.0), u(rng, -1.0, 1.0), dir[0], dir[1], dir[2]],
                "signs": (0..k).map(|_| sign(rng)).collect::<Vec<_>>(),
                "offsets": offsets(rng, k),
                "gammas": line_positions(rng, n, 0.2),
            })
        }
        ClassId::TooFewWalls => return Err(Error::invalid("TooFewWalls has no generator")),
    };
    Ok(v)
}

/// Upper-triangular `(a, b, c, e, f, i)` whose unit-norm curve crosses
/// every azimuth: the in-plane gain stays on one side of 1 and the vertical
/// gain on the other.
fn rank3_map<R: Rng>(rng: &mut R) -> Vec<f64> {
    loop {
        let expand = rng.gen_bool(0.5);
        let (lo, hi) = if expand { (1.15, 1.5) } else { (0.5, 0.85) };
        let (vlo, vhi) = if expand { (0.5, 0.85) } else { (1.15, 1.5) };
        let a = signed(rng, lo, hi);
        let e = signed(rng, lo, hi);
        let b = u(rng, -0.2, 0.2);
        let c = u(rng, -0.15, 0.15);
        let f = u(rng, -0.15, 0.15);
        let i = signed(rng, vlo, vhi);
        let plane = DMatrix::from_row_slice(2, 2, &[a * a, a * b, a * b, b * b + e * e]);
        let eig = plane.symmetric_eigenvalues();
        let w = c * c + f * f + i * i;
        let ok = if expand {
            eig.min() > 1.02 && w < 0.98
        } else {
            eig.max() < 0.98 && w > 1.02
        };
        if ok {
            return vec![a, b, c, e, f, i];
        }
    }
}

/// Extra acceptance rules on a generated pair, beyond the generator's own
/// checks: the rank-3 classes must really have rank-3 normals.
fn pair_is_usable<T: Real>(class: ClassId, pair: &GeneratedPair<T>) -> bool {
    match class {
        ClassId::Rank3Misc | ClassId::Rank3TwoParallelSets => {
            let n = pair.reference.normal_matrix();
            linalg::rank(&n, T::tol(1e-6)) == 3
        }
        _ => true,
    }
}

/// A feasible, non-identity parameter draw for `class` and its pair.
pub fn sample_pair<T: Real, R: Rng>(class: ClassId, rng: &mut R) -> Result<(ClassSpec<T>, GeneratedPair<T>)> {
    let mut last = Error::invalid("no attempt made");
    for _ in 0..500 {
        let params = match draw_params(class, rng) {
            Ok(p) => p,
            Err(e) => {
                last = e;
                continue;
            }
        };
        let spec = ClassSpec::<T>::from_json(class, params)?;
        match spec.generate() {
            Ok(pair) if pair_is_usable(class, &pair) => return Ok((spec, pair)),
            Ok(_) => last = Error::DegenerateClassParameters("normal rank below 3".into()),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Fills every field missing from `partial` with a random draw consistent
/// with the fields that are present (wall and waypoint counts follow the
/// user's choices).
pub fn complete_params<R: Rng>(class: ClassId, partial: &Value, rng: &mut R) -> Result<Value> {
    let user = match partial {
        Value::Object(m) => m.clone(),
        Value::Null => Map::new(),
        _ => return Err(Error::Parse("class parameters must be a JSON object".into())),
    };
    let mut drawn = None;
    for _ in 0..500 {
        if let Ok(v) = draw_params(class, rng) {
            drawn = Some(v);
            break;
        }
    }
    let Some(Value::Object(mut merged)) = drawn else {
        return Err(Error::invalid(format!("could not draw default parameters for {class}")));
    };
    for (k, v) in &user {
        merged.insert(k.clone(), v.clone());
    }
    let given = |key: &str| user.contains_key(key);
    let len_of = |m: &Map<String, Value>, key: &str| m.get(key).and_then(Value::as_array).map(Vec::len);

    // Wall count implied by the merged structure.
    let walls = match class {
        ClassId::Rank2Parallelogram | ClassId::Rank2Parallelepiped => {
            let extra: usize = merged
                .get("extra_parallel")
                .and_then(Value::as_array)
                .map(|a| a.iter().filter_map(Value::as_u64).sum::<u64>() as usize)
                .unwrap_or(0);
            Some(4 + extra)
        }
        ClassId::Rank3LinearTrajectory => len_of(&merged, "wall_angles"),
        ClassId::Rank2Prism => len_of(&merged, "azimuths"),
        ClassId::Rank3TwoParallelSets => len_of(&merged, "inclinations"),
        ClassId::Rank4PlanarTrajectory | ClassId::Rank5LinearTrajectory => len_of(&merged, "reference_walls"),
        ClassId::Rank3Misc => {
            let alpha = merged.get("alpha").and_then(Value::as_u64).unwrap_or(1) as usize;
            if given("reference_walls") {
                merged.remove("t");
                merged.remove("azimuths");
                merged.remove("branches");
                len_of(&merged, "reference_walls").map(|k| k * alpha)
            } else {
                len_of(&merged, "azimuths").map(|k| k * alpha)
            }
        }
        ClassId::Rank1Corridor | ClassId::Rank1Corridor3D => {
            len_of(&user, "offsets").or_else(|| len_of(&user, "flips")).or_else(|| len_of(&merged, "offsets"))
        }
        ClassId::TooFewWalls => None,
    };
    let per_wall: &[&str] = match class {
        ClassId::Rank3Misc => &["offsets"],
        ClassId::Rank3TwoParallelSets => &["offsets", "set_assignment"],
        ClassId::Rank1Corridor | ClassId::Rank1Corridor3D => &["offsets", "flips"],
        ClassId::Rank3LinearTrajectory | ClassId::Rank5LinearTrajectory => &["offsets", "signs", "equivalent_azimuths"],
        _ => &["offsets", "signs"],
    };
    if let Some(k) = walls {
        for &key in per_wall {
            if given(key) || len_of(&merged, key).is_none_or(|l| l == k) {
                continue;
            }
            let fresh = match key {
                "offsets" => json!(offsets(rng, k)),
                "flips" => json!((0..k).map(|j| j % 2 == 1).collect::<Vec<_>>()),
                "set_assignment" => json!((0..k).map(|j| (j % 2) * 2).collect::<Vec<_>>()),
                "equivalent_azimuths" => json!(values(rng, k, 0.0, TAU)),
                _ => json!([]),
            };
            merged.insert(key.to_string(), fresh);
        }
        if class == ClassId::Rank3Misc && !given("branches") {
            if let Some(m) = len_of(&merged, "azimuths") {
                if len_of(&merged, "branches") != Some(m) {
                    merged.insert("branches".into(), json!(vec![0; m]));
                }
            }
        }
    }

    // Per-waypoint arrays follow the number of user-given waypoints.
    let (anchor, followers): (&str, &[&str]) = match class {
        ClassId::Rank1Corridor => ("waypoints0", &["free_coords"]),
        ClassId::Rank1Corridor3D => ("waypoints0", &["free_yz"]),
        ClassId::Rank2Parallelepiped => ("waypoints0", &["free_z"]),
        ClassId::Rank2Prism => ("waypoints0", &["slide"]),
        _ => ("", &[]),
    };
    if given(anchor) {
        for &key in followers {
            if !given(key) {
                merged.remove(key);
            }
        }
    }
    Ok(Value::Object(merged))
}

/// Random unit normal: uniform angle in 2D, uniform on the sphere in 3D.
pub fn random_normal<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    if dim == 2 {
        let phi = u(rng, 0.0, TAU);
        vec![phi.cos(), phi.sin()]
    } else {
        let z: f64 = u(rng, -1.0, 1.0);
        let phi = u(rng, 0.0, TAU);
        let s = (1.0 - z * z).sqrt();
        vec![s * phi.cos(), s * phi.sin(), z]
    }
}

/// A well-conditioned generic configuration: no two walls closer than
/// ~3° to parallel, unit-norm system far from singular, and waypoints
/// spanning the space.
pub fn generic_configuration<T: Real, R: Rng>(rng: &mut R, dim: usize, walls: usize, waypoints: usize) -> Result<Configuration<T>> {
    if dim != 2 && dim != 3 {
        return Err(Error::invalid(format!("dimension must be 2 or 3, got {dim}")));
    }
    for _ in 0..10_000 {
        let normals: Vec<Vec<f64>> = (0..walls).map(|_| random_normal(rng, dim)).collect();
        let vecs: Vec<DVector<f64>> = normals.iter().map(|n| DVector::from_column_slice(n)).collect();
        let nearly_parallel = (0..walls).any(|i| {
            (i + 1..walls).any(|j| {
                let c = vecs[i].dot(&vecs[j]).abs();
                (1.0 - c * c).max(0.0).sqrt() < 0.05
            })
        });
        if nearly_parallel {
            continue;
        }
        if walls >= dim * (dim + 1) / 2 && s_system(dim, &vecs, 1e-12).relative_gap < 1e-3 {
            continue;
        }
        let pts = spread_points(rng, waypoints, dim, 2.0);
        let offs = offsets(rng, walls);
        let planes = normals
            .iter()
            .zip(&offs)
            .map(|(n, &q)| Plane::from_direction(DVector::from_iterator(dim, n.iter().map(|&x| T::lit(x))), T::lit(q)))
            .collect::<Result<Vec<_>>>()?;
        let pts_t = pts.iter().map(|p| DVector::from_iterator(dim, p.iter().map(|&x| T::lit(x)))).collect();
        let config = Configuration::new(dim, planes, pts_t)?;
        if affine_rank(config.waypoints(), T::tol(1e-6)) == (waypoints - 1).min(dim) {
            return Ok(config);
        }
    }
    Err(Error::invalid("could not draw a well-conditioned generic configuration"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{compute_ppdm, lemma1_residual};

    #[test]
    fn every_class_samples_a_valid_pair() {
        for (s, class) in ClassId::GENERATED.into_iter().enumerate() {
            let mut rng = stream_rng(5, s as u64);
            for _ in 0..5 {
                let (_, pair) = sample_pair::<f64, _>(class, &mut rng).unwrap_or_else(|e| panic!("{class}: {e}"));
                let diff = compute_ppdm(&pair.reference).max_abs_diff(&compute_ppdm(&pair.equivalent)).unwrap();
                assert!(diff <= 1e-9 * pair.reference.bounding_radius().max(1.0), "{class}: {diff}");
                let (l1, l2) = lemma1_residual(&pair.reference, &pair.equivalent).unwrap();
                assert!(l1 <= 1e-9 && l2 <= 1e-9, "{class}: {l1} {l2}");
            }
        }
    }

    #[test]
    fn draws_are_reproducible() {
        let a = draw_params(ClassId::Rank3Misc, &mut stream_rng(1, 2)).unwrap();
        let b = draw_params(ClassId::Rank3Misc, &mut stream_rng(1, 2)).unwrap();
        assert_eq!(a, b);
        let c = draw_params(ClassId::Rank3Misc, &mut stream_rng(1, 3)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn completion_respects_user_fields() {
        let mut rng = stream_rng(7, 0);
        let v = complete_params(ClassId::Rank2Parallelogram, &json!({"phi1": 0.0, "phi3": 1.5708, "d": 0.6}), &mut rng).unwrap();
        assert_eq!(v["d"], json!(0.6));
        let spec = ClassSpec::<f64>::from_json(ClassId::Rank2Parallelogram, v).unwrap();
        assert!(spec.generate().is_ok());

        let v = complete_params(ClassId::Rank1Corridor, &json!({"a": 0.0, "offsets": [1.0, 2.0, 3.0]}), &mut rng).unwrap();
        assert_eq!(v["flips"].as_array().unwrap().len(), 3);
        assert!(ClassSpec::<f64>::from_json(ClassId::Rank1Corridor, v).unwrap().generate().is_ok());
    }

    #[test]
    fn generic_configurations_are_generic() {
        let mut rng = stream_rng(3, 0);
        let c: Configuration<f64> = generic_configuration(&mut rng, 3, 6, 5).unwrap();
        assert_eq!(c.n_walls(), 6);
        assert_eq!(affine_rank(c.waypoints(), 1e-9), 3);
    }
}
