//! The seven ambiguity classes in space.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{expect_len, is_sign_diagonal, points, ClassId, GeneratedPair};
use crate::error::{Error, Result};
use crate::geometry::{Configuration, Plane};
use crate::linalg;
use crate::scalar::Real;

/// Parameters of an infinitely long and tall corridor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corridor3dParams<T> {
    /// Reference normals are `±(1, a, b) / √(1 + a² + b²)`.
    pub a: T,
    pub b: T,
    pub offsets: Vec<T>,
    /// Per-wall orientation flip; empty means alternating.
    #[serde(default)]
    pub flips: Vec<bool>,
    pub waypoints0: Vec<Vec<T>>,
    /// Equivalent-room `(y, z)` per waypoint; defaults to the reference ones.
    #[serde(default)]
    pub free_yz: Option<Vec<(T, T)>>,
}

/// Parameters of the hollow-parallelepiped class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelepipedParams<T> {
    /// Reference normals are orthogonal to `(a, b, -1)`.
    #[serde(default)]
    pub a: T,
    #[serde(default)]
    pub b: T,
    pub phi1: T,
    pub phi3: T,
    /// Free entry of `M = [[c, d, 0], [0, f, 0], [0, 0, 0]]`.
    pub f: T,
    /// Extra copies of the four base walls.
    #[serde(default)]
    pub extra_parallel: Vec<usize>,
    pub offsets: Vec<T>,
    pub waypoints0: Vec<Vec<T>>,
    /// Equivalent-room z-coordinates; default to the reference ones.
    #[serde(default)]
    pub free_z: Option<Vec<T>>,
    /// Index into the valid `(c, d)` solutions sorted lexicographically.
    #[serde(default)]
    pub branch: usize,
}

/// Parameters of the hollow-prism class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrismParams<T> {
    pub a: T,
    pub b: T,
    /// Signs of `c`, `f` and `r33`; empty means all `+1`.
    #[serde(default)]
    pub signs: Vec<i8>,
    /// Reference wall azimuths `φ⁰_k` (arbitrary).
    pub azimuths: Vec<T>,
    pub offsets: Vec<T>,
    pub waypoints0: Vec<Vec<T>>,
    /// Displacement of each equivalent waypoint along the prism axis.
    #[serde(default)]
    pub slide: Vec<T>,
}

/// Parameters of the miscellaneous rank-3 class.
///
/// Two modes are supported. With `t` the map is fixed and every azimuth in
/// `azimuths` contributes `alpha` walls taken from its four compatible
/// inclinations. With `reference_walls` the room is arbitrary (at most five
/// independent walls) and the dependent entries of `T` are solved for,
/// holding `free_params` fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rank3MiscParams<T> {
    #[serde(default = "one")]
    pub alpha: usize,
    /// `(a, b, c, e, f, i)` of the upper-triangular map.
    #[serde(default)]
    pub t: Option<Vec<T>>,
    #[serde(default)]
    pub azimuths: Vec<T>,
    /// Per-azimuth root choice (meaning depends on `alpha`).
    #[serde(default)]
    pub branches: Vec<usize>,
    /// `(θ⁰, φ⁰)` of the independent walls.
    #[serde(default)]
    pub reference_walls: Option<Vec<(T, T)>>,
    /// Values of the entries of `T` that stay free, keyed by name.
    #[serde(default)]
    pub free_params: BTreeMap<String, T>,
    pub offsets: Vec<T>,
    pub waypoints0: Vec<Vec<T>>,
}

fn one() -> usize {
    1
}

/// Parameters of the two-parallel-sets class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoParallelSetsParams<T> {
    pub a: T,
    pub b: T,
    pub e: T,
    /// Sign of `i = ±1`; defaults to `+1`.
    #[serde(default = "plus_one")]
    pub i_sign: i8,
    /// Reference inclinations `θ⁰_k` (arbitrary).
    pub inclinations: Vec<T>,
    /// Per wall, which of the four azimuth roots to use: 0 and 1 belong to
    /// the first set, 2 and 3 to the second.
    pub set_assignment: Vec<usize>,
    pub offsets: Vec<T>,
    pub waypoints0: Vec<Vec<T>>,
}

fn plus_one() -> i8 {
    1
}

/// Parameters of the planar-trajectory class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarTrajectoryParams<T> {
    /// `(θ⁰, φ⁰)` of every reference wall (arbitrary).
    pub reference_walls: Vec<(T, T)>,
    /// `(a, b, c, d, e, f, g, h)`.
    pub t: Vec<T>,
    /// Root choice per wall; empty picks the root closest to `n⁰_z`.
    #[serde(default)]
    pub signs: Vec<i8>,
    pub offsets: Vec<T>,
    /// Plane coordinates `(γ1, γ2)` of each waypoint.
    pub gammas: Vec<(T, T)>,
}

/// Parameters of the collinear-trajectory class in 3D.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearTrajectory3dParams<T> {
    pub reference_walls: Vec<(T, T)>,
    /// Equivalent azimuths `φ_k`; empty means `φ_k = φ⁰_k`.
    #[serde(default)]
    pub equivalent_azimuths: Vec<T>,
    /// `(a, b, c, d, e)`.
    pub t: Vec<T>,
    #[serde(default)]
    pub signs: Vec<i8>,
    pub offsets: Vec<T>,
    /// Position along the line of each waypoint. Ignored when
    /// `waypoints0` is given.
    #[serde(default)]
    pub gammas: Vec<T>,
    /// Reference waypoints; must lie on the line spanned by `(c, d, e)`.
    #[serde(default)]
    pub waypoints0: Option<Vec<Vec<T>>>,
}

/// Unit vector `(sin θ cos φ, sin θ sin φ, cos θ)`.
pub fn spherical<T: Real>(theta: T, phi: T) -> DVector<T> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    DVector::from_vec(vec![st * cp, st * sp, ct])
}

fn planes_from<T: Real>(normals: &[DVector<T>], offsets: &[T]) -> Result<Vec<Plane<T>>> {
    normals
        .iter()
        .zip(offsets)
        .map(|(n, &q)| Plane::from_direction(n.clone(), q))
        .collect()
}

fn lex_sort<T: Real>(v: &mut [(T, T)]) {
    v.sort_by(|x, y| {
        x.0.partial_cmp(&y.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.1.partial_cmp(&y.1).unwrap_or(std::cmp::Ordering::Equal))
    });
}

fn check_sign(s: i8) -> Result<Sign> {
    match s {
        1 => Ok(Sign::Plus),
        -1 => Ok(Sign::Minus),
        _ => Err(Error::invalid(format!("sign choices must be -1 or 1, got {s}"))),
    }
}

#[derive(Clone, Copy)]
enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn apply<T: Real>(self, x: T) -> T {
        match self {
            Sign::Plus => x,
            Sign::Minus => -x,
        }
    }
}

fn signs_or_default(signs: &[i8], k: usize, what: &str) -> Result<Vec<Sign>> {
    if signs.is_empty() {
        Ok(vec![Sign::Plus; k])
    } else {
        expect_len(signs, k, what)?;
        signs.iter().map(|&s| check_sign(s)).collect()
    }
}

fn transposed_inverse<T: Real>(t: &DMatrix<T>) -> Result<DMatrix<T>> {
    t.transpose()
        .try_inverse()
        .ok_or_else(|| Error::DegenerateClassParameters("T is singular".into()))
}

// ---------------------------------------------------------------------------
// Corridor

pub fn gen_corridor3d_pair<T: Real>(p: &Corridor3dParams<T>) -> Result<GeneratedPair<T>> {
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
    let r0 = points(3, &p.waypoints0, "waypoints0")?;
    let c = (T::one() + p.a * p.a + p.b * p.b).sqrt();
    let dir = DVector::from_vec(vec![T::one(), p.a, p.b]) / c;

    let mut n0 = Vec::with_capacity(k);
    let mut n = Vec::with_capacity(k);
    for &flip in &flips {
        let s = if flip { -T::one() } else { T::one() };
        n0.push(&dir * s);
        n.push(DVector::from_vec(vec![s, T::zero(), T::zero()]));
    }
    let yz: Vec<(T, T)> = match &p.free_yz {
        Some(v) => {
            expect_len(v, r0.len(), "free_yz")?;
            v.clone()
        }
        None => r0.iter().map(|r| (r[1], r[2])).collect(),
    };
    let r = r0
        .iter()
        .zip(&yz)
        .map(|(w, &(y, z))| DVector::from_vec(vec![(w[0] + p.a * w[1] + p.b * w[2]) / c, y, z]))
        .collect();

    Ok(GeneratedPair {
        class: ClassId::Rank1Corridor3D,
        reference: Configuration::new(3, planes_from(&n0, &p.offsets)?, r0)?,
        equivalent: Configuration::new(3, planes_from(&n, &p.offsets)?, r)?,
        transform: None,
        rotation: None,
    })
}

// ---------------------------------------------------------------------------
// Parallelepiped and prism

/// Unit reference normal at azimuth `φ` orthogonal to `(a, b, -1)`.
pub fn prismatic_normal<T: Real>(a: T, b: T, phi: T) -> DVector<T> {
    let (s, c) = phi.sin_cos();
    let v = DVector::from_vec(vec![c, s, a * c + b * s]);
    let norm = v.norm();
    v / norm
}

/// `(A, B, C)` of the quadratic in `cos 2φ⁰` for the rank-2 classes.
/// `A² + B² = 0` separates prisms from parallelepipeds.
pub fn rank2_abc<T: Real>(a: T, b: T, c: T, d: T, f: T) -> (T, T, T) {
    let two = T::lit(2.0);
    (
        -a * a + b * b + c * c - d * d - f * f,
        two * (a * b - c * d),
        a * a + b * b - c * c - d * d - f * f + two,
    )
}

/// Residual of `(c x + d y)² + (f y)² = 1` for the reference normal at `φ`.
pub fn parallelepiped_residual<T: Real>(a: T, b: T, c: T, d: T, f: T, phi: T) -> T {
    let n = prismatic_normal(a, b, phi);
    let u = c * n[0] + d * n[1];
    let v = f * n[1];
    u * u + v * v - T::one()
}

/// Reference azimuths in `[0, 2π)` compatible with `(a, b, c, d, f)`,
/// from the quadratic in `cos 2φ⁰` filtered by substitution.
pub fn parallelepiped_reference_azimuths<T: Real>(a: T, b: T, c: T, d: T, f: T) -> Result<Vec<T>> {
    let (qa, qb, qc) = rank2_abc(a, b, c, d, f);
    let lead = qa * qa + qb * qb;
    if lead <= T::tol(1e-14) {
        return Err(Error::Redirect {
            target: ClassId::Rank2Prism,
            detail: "A² + B² = 0: every azimuth is compatible".into(),
        });
    }
    let disc = qa * qa * qc * qc - lead * (qc * qc - qb * qb);
    if disc < -T::tol(1e-12) {
        return Err(Error::infeasible("(A² + B²) X² - 2ACX + C² - B² = 0", None, "negative discriminant"));
    }
    let root = disc.max(T::zero()).sqrt();
    let two_pi = T::two_pi();
    let mut out: Vec<T> = Vec::new();
    for x in [(qa * qc + root) / lead, (qa * qc - root) / lead] {
        let half = x.max(-T::one()).min(T::one()).acos() * T::lit(0.5);
        for base in [half, -half] {
            for shift in [T::zero(), T::pi()] {
                let mut phi = (base + shift) % two_pi;
                if phi < T::zero() {
                    phi += two_pi;
                }
                if parallelepiped_residual(a, b, c, d, f, phi).abs() <= T::tol(1e-10)
                    && out.iter().all(|&q| angle_gap(q, phi) > T::tol(1e-9))
                {
                    out.push(phi);
                }
            }
        }
    }
    out.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

fn angle_gap<T: Real>(x: T, y: T) -> T {
    let d = (x - y).abs() % T::two_pi();
    d.min(T::two_pi() - d)
}

/// Valid `(c, d)` for the parallelepiped class, sorted lexicographically.
pub fn parallelepiped_branches<T: Real>(a: T, b: T, phi1: T, phi3: T, f: T) -> Result<Vec<(T, T)>> {
    let n1 = prismatic_normal(a, b, phi1);
    let n3 = prismatic_normal(a, b, phi3);
    let det = n1[0] * n3[1] - n1[1] * n3[0];
    if det.abs() <= T::tol(1e-9) {
        return Err(Error::invalid("phi1 and phi3 must not describe parallel walls"));
    }
    let mut rhs = [T::zero(); 2];
    for (slot, (n, wall)) in rhs.iter_mut().zip([(&n1, 0usize), (&n3, 2)]) {
        let radicand = T::one() - f * f * n[1] * n[1];
        if radicand < -T::tol(1e-12) {
            return Err(Error::infeasible(
                "(c x + d y)² + (f y)² = 1",
                Some(wall),
                format!("1 - f² y² = {:e} < 0", radicand.as_f64()),
            ));
        }
        *slot = radicand.max(T::zero()).sqrt();
    }
    let tol = T::tol(1e-10);
    let mut out: Vec<(T, T)> = Vec::new();
    for s1 in [-T::one(), T::one()] {
        for s3 in [-T::one(), T::one()] {
            let (r1, r3) = (s1 * rhs[0], s3 * rhs[1]);
            let c = (r1 * n3[1] - r3 * n1[1]) / det;
            let d = (n1[0] * r3 - n3[0] * r1) / det;
            if c.abs() <= tol {
                continue;
            }
            if out.iter().all(|&(x, y)| (x - c).abs() > tol || (y - d).abs() > tol) {
                out.push((c, d));
            }
        }
    }
    lex_sort(&mut out);
    if out.is_empty() {
        return Err(Error::DegenerateClassParameters("every solution for (c, d) is singular".into()));
    }
    Ok(out)
}

pub fn gen_parallelepiped_pair<T: Real>(p: &ParallelepipedParams<T>) -> Result<GeneratedPair<T>> {
    if p.extra_parallel.len() > 4 {
        return Err(Error::invalid("extra_parallel has one count per base wall (at most four)"));
    }
    if p.f.abs() <= T::tol(1e-12) {
        return Err(Error::DegenerateClassParameters("f = 0 collapses the room".into()));
    }
    let branches = parallelepiped_branches(p.a, p.b, p.phi1, p.phi3, p.f)?;
    let &(c, d) = branches.get(p.branch).ok_or_else(|| {
        Error::invalid(format!("branch {} out of range ({} valid solutions)", p.branch, branches.len()))
    })?;
    let m = DMatrix::from_row_slice(3, 3, &[c, d, T::zero(), T::zero(), p.f, T::zero(), T::zero(), T::zero(), T::zero()]);

    let n1 = prismatic_normal(p.a, p.b, p.phi1);
    let n3 = prismatic_normal(p.a, p.b, p.phi3);
    let base = [n1.clone(), -&n1, n3.clone(), -&n3];
    let tol = T::tol(1e-10);
    let identity_on_span = base.iter().all(|n| (&m * n - n).amax() <= tol);
    let (qa, qb, _) = rank2_abc(p.a, p.b, c, d, p.f);
    if !identity_on_span && (qa * qa + qb * qb).sqrt() <= tol {
        return Err(Error::Redirect {
            target: ClassId::Rank2Prism,
            detail: "A² + B² = 0 for these parameters; the rooms are rotated copies".into(),
        });
    }

    let mut n0: Vec<DVector<T>> = base.to_vec();
    for (i, &count) in p.extra_parallel.iter().enumerate() {
        n0.extend(std::iter::repeat_n(base[i].clone(), count));
    }
    expect_len(&p.offsets, n0.len(), "offsets")?;
    let n: Vec<DVector<T>> = n0.iter().map(|v| &m * v).collect();

    let r0 = points(3, &p.waypoints0, "waypoints0")?;
    let zs: Vec<T> = match &p.free_z {
        Some(z) => {
            expect_len(z, r0.len(), "free_z")?;
            z.clone()
        }
        None => r0.iter().map(|w| w[2]).collect(),
    };
    let r = r0
        .iter()
        .zip(&zs)
        .map(|(w, &z)| {
            let x = (w[0] + p.a * w[2]) / c;
            let y = (w[1] + p.b * w[2] - d * x) / p.f;
            DVector::from_vec(vec![x, y, z])
        })
        .collect();

    Ok(GeneratedPair {
        class: ClassId::Rank2Parallelepiped,
        reference: Configuration::new(3, planes_from(&n0, &p.offsets)?, r0)?,
        equivalent: Configuration::new(3, planes_from(&n, &p.offsets)?, r)?,
        transform: Some(m),
        rotation: None,
    })
}

/// `(c, d, f)` of the prism class and the rotation relating the rooms.
pub fn prism_rotation<T: Real>(a: T, b: T, signs: &[i8]) -> Result<((T, T, T), DMatrix<T>)> {
    let s = if signs.is_empty() {
        vec![Sign::Plus; 3]
    } else {
        expect_len(signs, 3, "signs")?;
        signs.iter().map(|&x| check_sign(x)).collect::<Result<Vec<_>>>()?
    };
    let a2 = a * a + T::one();
    let c = s[0].apply(a2.sqrt());
    let d = a * b / c;
    let f_rad = (a * a + b * b + T::one()) / a2;
    if f_rad < T::zero() {
        return Err(Error::infeasible("f = ±√(b² - a²b²/(a² + 1) + 1)", None, "negative radicand"));
    }
    let f = s[1].apply(f_rad.sqrt());
    let r13 = a / c;
    let r23 = (b - d * r13) / f;
    let r33 = s[2].apply((T::one() - r13 * r13 - r23 * r23).max(T::zero()).sqrt());
    let z = T::zero();
    let m = DMatrix::from_row_slice(3, 3, &[c, d, z, z, f, z, z, z, z]);
    let col = DVector::from_vec(vec![r13, r23, r33]);
    let w = DVector::from_vec(vec![a, b, -T::one()]);
    Ok(((c, d, f), m - col * w.transpose()))
}

pub fn gen_prism_pair<T: Real>(p: &PrismParams<T>) -> Result<GeneratedPair<T>> {
    let k = p.azimuths.len();
    if k < 2 {
        return Err(Error::invalid("a prism needs at least two walls"));
    }
    expect_len(&p.offsets, k, "offsets")?;
    let ((c, d, f), rot) = prism_rotation(p.a, p.b, &p.signs)?;
    let z = T::zero();
    let m = DMatrix::from_row_slice(3, 3, &[c, d, z, z, f, z, z, z, z]);
    let n0: Vec<DVector<T>> = p.azimuths.iter().map(|&phi| prismatic_normal(p.a, p.b, phi)).collect();
    let n: Vec<DVector<T>> = n0.iter().map(|v| &m * v).collect();
    let r0 = points(3, &p.waypoints0, "waypoints0")?;
    let slide: Vec<T> = if p.slide.is_empty() {
        vec![T::zero(); r0.len()]
    } else {
        expect_len(&p.slide, r0.len(), "slide")?;
        p.slide.clone()
    };
    let r = r0
        .iter()
        .zip(&slide)
        .map(|(w, &s)| {
            let mut x = &rot * w;
            x[2] += s;
            x
        })
        .collect();

    Ok(GeneratedPair {
        class: ClassId::Rank2Prism,
        reference: Configuration::new(3, planes_from(&n0, &p.offsets)?, r0)?,
        equivalent: Configuration::new(3, planes_from(&n, &p.offsets)?, r)?,
        transform: Some(m),
        rotation: Some(rot),
    })
}

// ---------------------------------------------------------------------------
// Rank-3 classes

/// Entries `(a, b, c, e, f, i)` as an upper-triangular matrix.
pub fn upper_t<T: Real>(t: &[T]) -> DMatrix<T> {
    let z = T::zero();
    DMatrix::from_row_slice(3, 3, &[t[0], t[1], t[2], z, t[3], t[4], z, z, t[5]])
}

/// `|T n|² - 1` for the unit normal at `(θ, φ)`.
pub fn rank3_residual<T: Real>(t: &[T], theta: T, phi: T) -> T {
    (upper_t(t) * spherical(theta, phi)).norm_squared() - T::one()
}

/// `(A, B, C)` of the quadratic in `cos 2θ⁰` for azimuth `φ⁰`.
pub fn rank3_abc<T: Real>(t: &[T], phi: T) -> (T, T, T) {
    let (a, b, c, e, f, i) = (t[0], t[1], t[2], t[3], t[4], t[5]);
    let (s, co) = phi.sin_cos();
    let cc = c * c + f * f + i * i - T::one();
    let aa = a * a * co * co + (b * b + e * e) * s * s + T::lit(2.0) * a * b * s * co - cc - T::one();
    let bb = T::lit(2.0) * (a * c * co + (b * c + e * f) * s);
    (aa, bb, cc)
}

/// The four inclinations compatible with `T` at azimuth `φ⁰`, ordered
/// `[θ1, θ1 + π, θ3, θ3 + π]` (the first pair from `x1`, the second from
/// `x2`).
pub fn rank3_theta_roots<T: Real>(t: &[T], phi: T, wall: usize) -> Result<[T; 4]> {
    let (aa, bb, cc) = rank3_abc(t, phi);
    let lead = aa * aa + bb * bb;
    let scale = T::one() + t.iter().fold(T::zero(), |m, x| m.max(x.abs())).powi(2);
    let tol = T::tol(1e-10) * scale;
    let pi = T::pi();
    if lead <= T::tol(1e-20) * scale * scale {
        if cc.abs() <= tol {
            // Every inclination is compatible; pick a fixed representative set.
            let t1 = pi / T::lit(3.0);
            let t3 = pi * T::lit(2.0) / T::lit(3.0);
            return Ok([t1, t1 + pi, t3, t3 + pi]);
        }
        return Err(Error::infeasible("|T n⁰_k|² = 1", Some(wall), "no inclination is compatible at this azimuth"));
    }
    let disc = bb * bb - T::lit(4.0) * aa * cc - T::lit(4.0) * cc * cc;
    if disc < -tol {
        return Err(Error::infeasible(
            "x = (A(A+2C) ± B√(B² - 4AC - 4C²)) / (A² + B²)",
            Some(wall),
            format!("negative discriminant {:e}", disc.as_f64()),
        ));
    }
    let root = bb * disc.max(T::zero()).sqrt();
    let mid = aa * (aa + cc + cc);
    let xs = [(mid + root) / lead, (mid - root) / lead];
    let mut valid: Vec<T> = Vec::new();
    for x in xs {
        let half = x.max(-T::one()).min(T::one()).acos() * T::lit(0.5);
        for base in [half, -half] {
            let th = polish_theta(t, if base < T::zero() { base + pi } else { base }, phi);
            if rank3_residual(t, th, phi).abs() <= tol && valid.iter().all(|&v| angle_gap(v, th) > T::tol(1e-9)) {
                valid.push(th);
            }
        }
    }
    match valid.as_slice() {
        [] => Err(Error::infeasible("|T n⁰_k|² = 1", Some(wall), "no root passes substitution")),
        [t1] => Ok([*t1, *t1 + pi, *t1, *t1 + pi]),
        [t1, t3, ..] => Ok([*t1, *t1 + pi, *t3, *t3 + pi]),
    }
}

/// A few Newton steps on `|T n(θ, φ)|² - 1 = 0`; `acos` near ±1 loses
/// about half the digits, which this restores.
fn polish_theta<T: Real>(t: &[T], theta: T, phi: T) -> T {
    let (a, b, c, e, f, i) = (t[0], t[1], t[2], t[3], t[4], t[5]);
    let (s, co) = phi.sin_cos();
    let p = a * co + b * s;
    let q = e * s;
    let u = p * p + q * q;
    let v = p * c + q * f;
    let w = c * c + f * f + i * i;
    let mut th = theta;
    for _ in 0..4 {
        let (st, ct) = th.sin_cos();
        let g = u * st * st + T::lit(2.0) * v * st * ct + w * ct * ct - T::one();
        let dg = (u - w) * (th + th).sin() + T::lit(2.0) * v * (th + th).cos();
        if dg.abs() <= T::tol(1e-6) {
            break;
        }
        let next = th - g / dg;
        if (next - th).abs() > T::lit(1e-3) {
            break;
        }
        th = next;
    }
    th
}

const T_NAMES: [&str; 6] = ["a", "b", "c", "e", "f", "i"];
const T_IDENTITY: [f64; 6] = [1.0, 0.0, 0.0, 1.0, 0.0, 1.0];

fn rank3_jacobian_row<T: Real>(t: &[T], n: &DVector<T>) -> (T, [T; 6]) {
    let tn = upper_t(t) * n;
    let two = T::lit(2.0);
    (
        tn.norm_squared() - T::one(),
        [
            two * tn[0] * n[0],
            two * tn[0] * n[1],
            two * tn[0] * n[2],
            two * tn[1] * n[1],
            two * tn[1] * n[2],
            two * tn[2] * n[2],
        ],
    )
}

/// Solves `|T n_k| = 1` for the entries of `T` not listed in `free`.
///
/// The free entries are moved from their identity values to the requested
/// ones in small steps, re-solving for the dependent entries each time
/// starting from the previous solution (the identity solves the system at
/// the start).
pub fn solve_rank3_dependent<T: Real>(normals: &[DVector<T>], free: &BTreeMap<String, T>) -> Result<Vec<T>> {
    let k0 = normals.len();
    if k0 >= 6 {
        return Err(Error::OverconstrainedClass(format!(
            "{k0} independent walls constrain all six entries of T"
        )));
    }
    let mut free_idx = Vec::new();
    for name in free.keys() {
        let idx = T_NAMES
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::invalid(format!("unknown T entry `{name}` (expected one of a, b, c, e, f, i)")))?;
        free_idx.push(idx);
    }
    if free_idx.len() != 6 - k0 {
        return Err(Error::invalid(format!(
            "{k0} independent walls leave {} free entries of T, {} given",
            6 - k0,
            free_idx.len()
        )));
    }
    let dep: Vec<usize> = (0..6).filter(|i| !free_idx.contains(i)).collect();
    let target: Vec<T> = free.values().copied().collect();
    let mut current: Vec<T> = T_IDENTITY.iter().map(|&x| T::lit(x)).collect();

    let steps = 32;
    for step in 1..=steps {
        let s = T::lit(step as f64 / steps as f64);
        for (&idx, &goal) in free_idx.iter().zip(&target) {
            let start = T::lit(T_IDENTITY[idx]);
            current[idx] = start + (goal - start) * s;
        }
        let x0 = DVector::from_iterator(dep.len(), dep.iter().map(|&i| current[i]));
        let base = current.clone();
        let report = linalg::levenberg_marquardt(
            |x: &DVector<T>| {
                let mut t = base.clone();
                for (j, &i) in dep.iter().enumerate() {
                    t[i] = x[j];
                }
                let mut r = DVector::zeros(k0);
                let mut jac = DMatrix::zeros(k0, dep.len());
                for (row, n) in normals.iter().enumerate() {
                    let (res, grad) = rank3_jacobian_row(&t, n);
                    r[row] = res;
                    for (j, &i) in dep.iter().enumerate() {
                        jac[(row, j)] = grad[i];
                    }
                }
                (r, jac)
            },
            x0,
            200,
            T::tol(1e-14),
        );
        for (j, &i) in dep.iter().enumerate() {
            current[i] = report.x[j];
        }
        let final_step = step == steps;
        let limit = if final_step { T::tol(1e-11) } else { T::tol(1e-6) };
        if report.max_residual > limit {
            return Err(Error::infeasible(
                "|T n⁰_k|² = 1",
                None,
                format!(
                    "continuation lost the solution at step {step}/{steps} (residual {:e})",
                    report.max_residual.as_f64()
                ),
            ));
        }
    }
    Ok(current)
}

fn rank3_group(alpha: usize, branch: usize) -> Result<Vec<usize>> {
    let group = match alpha {
        1 if branch < 4 => vec![branch],
        2 => match branch {
            0 => vec![0, 1],
            1 => vec![2, 3],
            2 => vec![0, 2],
            3 => vec![1, 3],
            _ => return Err(Error::invalid(format!("alpha = 2 takes branch 0..3, got {branch}"))),
        },
        3 if branch < 4 => (0..4).filter(|&j| j != branch).collect(),
        4 => vec![0, 1, 2, 3],
        1 | 3 => return Err(Error::invalid(format!("branch must be 0..3, got {branch}"))),
        _ => return Err(Error::invalid(format!("alpha must be 1..4, got {alpha}"))),
    };
    Ok(group)
}

fn check_rank3_t<T: Real>(t: &DMatrix<T>) -> Result<()> {
    if (0..3).any(|i| t[(i, i)].abs() <= T::tol(1e-12)) {
        return Err(Error::DegenerateClassParameters("T is singular".into()));
    }
    Ok(())
}

pub fn gen_rank3_pair<T: Real>(p: &Rank3MiscParams<T>) -> Result<GeneratedPair<T>> {
    if !(1..=4).contains(&p.alpha) {
        return Err(Error::invalid(format!("alpha must be 1..4, got {}", p.alpha)));
    }
    let (t_entries, n0) = match (&p.t, &p.reference_walls) {
        (Some(t), None) => {
            expect_len(t, 6, "t")?;
            if p.azimuths.is_empty() {
                return Err(Error::invalid("azimuths: at least one is required"));
            }
            let branches: Vec<usize> = if p.branches.is_empty() {
                vec![0; p.azimuths.len()]
            } else {
                expect_len(&p.branches, p.azimuths.len(), "branches")?;
                p.branches.clone()
            };
            let mut normals = Vec::new();
            for (k, (&phi, &br)) in p.azimuths.iter().zip(&branches).enumerate() {
                let roots = rank3_theta_roots(t, phi, k)?;
                for j in rank3_group(p.alpha, br)? {
                    normals.push(spherical(roots[j], phi));
                }
            }
            (t.clone(), normals)
        }
        (None, Some(walls)) => {
            if walls.is_empty() {
                return Err(Error::invalid("reference_walls: at least one is required"));
            }
            let independent: Vec<DVector<T>> = walls.iter().map(|&(th, ph)| spherical(th, ph)).collect();
            let t = solve_rank3_dependent(&independent, &p.free_params)?;
            let mut normals = Vec::new();
            for (k, (n, &(_, phi))) in independent.iter().zip(walls).enumerate() {
                normals.push(n.clone());
                if p.alpha == 1 {
                    continue;
                }
                // Locate the given wall among the four compatible inclinations
                // and add its companions.
                let roots = rank3_theta_roots(&t, phi, k)?;
                let cand: Vec<DVector<T>> = roots.iter().map(|&th| spherical(th, phi)).collect();
                let own = cand
                    .iter()
                    .enumerate()
                    .min_by(|x, y| {
                        (x.1 - n).norm().partial_cmp(&(y.1 - n).norm()).unwrap_or(std::cmp::Ordering::Equal)
                    })
                    .map(|(j, _)| j)
                    .unwrap_or(0);
                let others: Vec<usize> = (0..4).filter(|&j| j / 2 != own / 2).collect();
                match p.alpha {
                    2 => normals.push(-n),
                    3 => {
                        normals.push(-n);
                        normals.push(cand[others[0]].clone());
                    }
                    _ => {
                        normals.push(-n);
                        normals.push(cand[others[0]].clone());
                        normals.push(cand[others[1]].clone());
                    }
                }
            }
            (t, normals)
        }
        _ => return Err(Error::invalid("give exactly one of `t` (with azimuths) or `reference_walls`")),
    };

    let t = upper_t(&t_entries);
    check_rank3_t(&t)?;
    if is_sign_diagonal(&t, T::tol(1e-10)) && (t.clone() - DMatrix::identity(3, 3)).amax() > T::tol(1e-10) {
        return Err(Error::DegenerateClassParameters("T is a pure reflection".into()));
    }
    expect_len(&p.offsets, n0.len(), "offsets")?;
    let n: Vec<DVector<T>> = n0.iter().map(|v| &t * v).collect();
    let r0 = points(3, &p.waypoints0, "waypoints0")?;
    let tit = transposed_inverse(&t)?;
    let r = r0.iter().map(|w| &tit * w).collect();

    Ok(GeneratedPair {
        class: ClassId::Rank3Misc,
        reference: Configuration::new(3, planes_from(&n0, &p.offsets)?, r0)?,
        equivalent: Configuration::new(3, planes_from(&n, &p.offsets)?, r)?,
        transform: Some(t),
        rotation: None,
    })
}

/// Discriminant `-a²e² + a² + b² + e² - 1` of the azimuth equation of the
/// two-parallel-sets class.
pub fn two_sets_discriminant<T: Real>(a: T, b: T, e: T) -> T {
    -a * a * e * e + a * a + b * b + e * e - T::one()
}

/// `z1, z2` with `z = (u² - 1) / u`, `u = tan(φ⁰ / 2)`.
pub fn two_sets_z<T: Real>(a: T, b: T, e: T) -> Result<(T, T)> {
    if a.abs() <= T::tol(1e-12) || e.abs() <= T::tol(1e-12) {
        return Err(Error::Redirect {
            target: ClassId::Rank4PlanarTrajectory,
            detail: "a = 0 or e = 0 makes the trajectories coplanar".into(),
        });
    }
    let denom = a * a - T::one();
    if denom.abs() <= T::tol(1e-12) {
        return Err(Error::infeasible("z = (2ab ± 2√Δ) / (a² - 1)", None, "a² = 1"));
    }
    let disc = two_sets_discriminant(a, b, e);
    if disc < -T::tol(1e-12) {
        return Err(Error::infeasible(
            "Δ = -a²e² + a² + b² + e² - 1 ≥ 0",
            None,
            format!("Δ = {:e}", disc.as_f64()),
        ));
    }
    let root = T::lit(2.0) * disc.max(T::zero()).sqrt();
    let two_ab = T::lit(2.0) * a * b;
    Ok(((two_ab + root) / denom, (two_ab - root) / denom))
}

/// The four azimuths `[z1 +, z1 -, z2 +, z2 -]`; each pair differs by π.
pub fn two_sets_azimuths<T: Real>(a: T, b: T, e: T) -> Result<[T; 4]> {
    let (z1, z2) = two_sets_z(a, b, e)?;
    let two = T::lit(2.0);
    let phi = |z: T, s: T| two * ((z + s * (z * z + T::lit(4.0)).sqrt()) / two).atan();
    Ok([phi(z1, T::one()), phi(z1, -T::one()), phi(z2, T::one()), phi(z2, -T::one())])
}

/// Residual of `(a cos φ + b sin φ)² + e² sin² φ = 1`.
pub fn two_sets_residual<T: Real>(a: T, b: T, e: T, phi: T) -> T {
    let (s, c) = phi.sin_cos();
    let x = a * c + b * s;
    x * x + e * e * s * s - T::one()
}

pub fn gen_two_parallel_sets_pair<T: Real>(p: &TwoParallelSetsParams<T>) -> Result<GeneratedPair<T>> {
    let k = p.inclinations.len();
    if k == 0 {
        return Err(Error::invalid("inclinations: at least one wall is required"));
    }
    expect_len(&p.set_assignment, k, "set_assignment")?;
    expect_len(&p.offsets, k, "offsets")?;
    let i = check_sign(p.i_sign)?.apply(T::one());
    let phis = two_sets_azimuths(p.a, p.b, p.e)?;
    let z = T::zero();
    let t = DMatrix::from_row_slice(3, 3, &[p.a, p.b, z, z, p.e, z, z, z, i]);
    if is_sign_diagonal(&t, T::tol(1e-10)) {
        return Err(Error::DegenerateClassParameters("T is a rigid motion".into()));
    }
    let mut n0 = Vec::with_capacity(k);
    for (&theta, &set) in p.inclinations.iter().zip(&p.set_assignment) {
        let phi = *phis
            .get(set)
            .ok_or_else(|| Error::invalid(format!("set_assignment entries must be 0..3, got {set}")))?;
        n0.push(spherical(theta, phi));
    }
    let n: Vec<DVector<T>> = n0.iter().map(|v| &t * v).collect();
    let r0 = points(3, &p.waypoints0, "waypoints0")?;
    let tit = transposed_inverse(&t)?;
    let r = r0.iter().map(|w| &tit * w).collect();

    Ok(GeneratedPair {
        class: ClassId::Rank3TwoParallelSets,
        reference: Configuration::new(3, planes_from(&n0, &p.offsets)?, r0)?,
        equivalent: Configuration::new(3, planes_from(&n, &p.offsets)?, r)?,
        transform: Some(t),
        rotation: None,
    })
}

// ---------------------------------------------------------------------------
// Degenerate trajectories

/// Equivalent normal of the planar-trajectory class for reference normal
/// `n0`: `(G_a + d z, G_e + h z, z)` with `z` a root of the unit-norm
/// quadratic. `sign` picks the root; `None` picks the one closest to `n0_z`.
pub fn planar_trajectory_normal<T: Real>(t: &[T], n0: &DVector<T>, sign: Option<i8>, wall: usize) -> Result<DVector<T>> {
    let (a, b, c, d, e, f, g, h) = (t[0], t[1], t[2], t[3], t[4], t[5], t[6], t[7]);
    let ga = a * n0[0] + b * n0[1] + c * n0[2];
    let ge = e * n0[0] + f * n0[1] + g * n0[2];
    let lead = T::one() + d * d + h * h;
    let mid = d * ga + h * ge;
    let big_g = mid * mid - lead * (ga * ga + ge * ge - T::one());
    if big_g < -T::tol(1e-12) {
        return Err(Error::infeasible(
            "G = (d G_a + h G_e)² - (1 + d² + h²)(G_a² + G_e² - 1) ≥ 0",
            Some(wall),
            format!("G = {:e}", big_g.as_f64()),
        ));
    }
    let root = big_g.max(T::zero()).sqrt();
    let zp = (-mid + root) / lead;
    let zm = (-mid - root) / lead;
    let z = match sign {
        Some(1) => zp,
        Some(-1) => zm,
        Some(s) => return Err(Error::invalid(format!("sign choices must be -1 or 1, got {s}"))),
        None => {
            if (zp - n0[2]).abs() <= (zm - n0[2]).abs() {
                zp
            } else {
                zm
            }
        }
    };
    Ok(DVector::from_vec(vec![ga + d * z, ge + h * z, z]))
}

pub fn gen_planar_trajectory_pair<T: Real>(p: &PlanarTrajectoryParams<T>) -> Result<GeneratedPair<T>> {
    let k = p.reference_walls.len();
    if k == 0 {
        return Err(Error::invalid("reference_walls: at least one wall is required"));
    }
    expect_len(&p.t, 8, "t")?;
    expect_len(&p.offsets, k, "offsets")?;
    if !p.signs.is_empty() {
        expect_len(&p.signs, k, "signs")?;
    }
    if p.gammas.is_empty() {
        return Err(Error::invalid("gammas: at least one waypoint is required"));
    }
    let n0: Vec<DVector<T>> = p.reference_walls.iter().map(|&(th, ph)| spherical(th, ph)).collect();
    let n = n0
        .iter()
        .enumerate()
        .map(|(idx, v)| planar_trajectory_normal(&p.t, v, p.signs.get(idx).copied(), idx))
        .collect::<Result<Vec<_>>>()?;
    let t = &p.t;
    let r0 = p
        .gammas
        .iter()
        .map(|&(g1, g2)| DVector::from_vec(vec![-(t[0] * g1 + t[4] * g2), -(t[1] * g1 + t[5] * g2), -(t[2] * g1 + t[6] * g2)]))
        .collect();
    let r = p
        .gammas
        .iter()
        .map(|&(g1, g2)| DVector::from_vec(vec![-g1, -g2, t[3] * g1 + t[7] * g2]))
        .collect();

    Ok(GeneratedPair {
        class: ClassId::Rank4PlanarTrajectory,
        reference: Configuration::new(3, planes_from(&n0, &p.offsets)?, r0)?,
        equivalent: Configuration::new(3, planes_from(&n, &p.offsets)?, r)?,
        transform: None,
        rotation: None,
    })
}

/// Equivalent inclination of the linear-trajectory class:
/// `s acos(β / √(1 + h²)) - atan h`, `h = a cos φ + b sin φ`,
/// `β = <(c, d, e), n⁰>`.
pub fn linear_trajectory3d_theta<T: Real>(t: &[T], n0: &DVector<T>, phi: T, sign: T, wall: usize) -> Result<T> {
    let h = t[0] * phi.cos() + t[1] * phi.sin();
    let beta = t[2] * n0[0] + t[3] * n0[1] + t[4] * n0[2];
    let ratio = beta / (T::one() + h * h).sqrt();
    if ratio.abs() > T::one() + T::tol(1e-12) {
        return Err(Error::infeasible(
            "|β| ≤ √(1 + h²)",
            Some(wall),
            format!("acos argument {:.6} outside [-1, 1]", ratio.as_f64()),
        ));
    }
    Ok(sign * ratio.max(-T::one()).min(T::one()).acos() - h.atan())
}

pub fn gen_linear_trajectory3d_pair<T: Real>(p: &LinearTrajectory3dParams<T>) -> Result<GeneratedPair<T>> {
    let k = p.reference_walls.len();
    if k == 0 {
        return Err(Error::invalid("reference_walls: at least one wall is required"));
    }
    expect_len(&p.t, 5, "t")?;
    expect_len(&p.offsets, k, "offsets")?;
    let azimuths: Vec<T> = if p.equivalent_azimuths.is_empty() {
        p.reference_walls.iter().map(|&(_, ph)| ph).collect()
    } else {
        expect_len(&p.equivalent_azimuths, k, "equivalent_azimuths")?;
        p.equivalent_azimuths.clone()
    };
    let signs = signs_or_default(&p.signs, k, "signs")?;
    let t = &p.t;

    let n0: Vec<DVector<T>> = p.reference_walls.iter().map(|&(th, ph)| spherical(th, ph)).collect();
    let mut n = Vec::with_capacity(k);
    for (idx, ((v, &phi), s)) in n0.iter().zip(&azimuths).zip(&signs).enumerate() {
        let theta = linear_trajectory3d_theta(t, v, phi, s.apply(T::one()), idx)?;
        n.push(spherical(theta, phi));
    }

    let dir0 = DVector::from_vec(vec![-t[2], -t[3], -t[4]]);
    let gammas: Vec<T> = match &p.waypoints0 {
        Some(raw) => {
            let pts = points(3, raw, "waypoints0")?;
            let len2 = dir0.norm_squared();
            if len2 <= T::tol(1e-24) {
                return Err(Error::invalid("(c, d, e) = 0: the reference trajectory is a single point"));
            }
            pts.iter()
                .enumerate()
                .map(|(idx, w)| {
                    let g = w.dot(&dir0) / len2;
                    let off = (w - &dir0 * g).norm();
                    if off > T::tol(1e-9) * (T::one() + w.norm()) {
                        Err(Error::invalid(format!(
                            "waypoint {idx} is not on the line spanned by (c, d, e) (distance {:e})",
                            off.as_f64()
                        )))
                    } else {
                        Ok(g)
                    }
                })
                .collect::<Result<_>>()?
        }
        None => {
            if p.gammas.is_empty() {
                return Err(Error::invalid("gammas: at least one waypoint is required"));
            }
            p.gammas.clone()
        }
    };
    let r0 = gammas.iter().map(|&g| &dir0 * g).collect();
    let r = gammas
        .iter()
        .map(|&g| DVector::from_vec(vec![t[0] * g, t[1] * g, -g]))
        .collect();

    Ok(GeneratedPair {
        class: ClassId::Rank5LinearTrajectory,
        reference: Configuration::new(3, planes_from(&n0, &p.offsets)?, r0)?,
        equivalent: Configuration::new(3, planes_from(&n, &p.offsets)?, r)?,
        transform: None,
        rotation: None,
    })
}
