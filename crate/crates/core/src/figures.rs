//! Plot data for the equivalence-family illustrations (figures 3 to 13).
//!
//! Each figure is a family of configurations sharing one PPDM: a reference
//! followed by one or more equivalents. Fixed shape parameters reproduce the
//! illustrated situation; offsets and waypoints come from the seed. Every
//! pair in the family is verified and the outcome is stored with the data,
//! together with wall outlines clipped to a box (segments in 2D, polygons
//! in 3D) so that any plotting tool can draw them.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::classes::spatial::two_sets_azimuths;
use crate::classes::{ClassId, ClassSpec, GeneratedPair};
use crate::error::{Error, Result};
use crate::geometry::{compute_ppdm, Configuration, Plane, Ppdm};
use crate::io::ConfigurationDto;
use crate::sampling::stream_rng;
use crate::verify::{verify_pair, PairVerdict, VerificationReport};

pub const FIGURE_IDS: std::ops::RangeInclusive<u32> = 3..=13;

#[derive(Debug, Clone, Serialize)]
pub struct FigureConfiguration {
    pub label: String,
    pub configuration: ConfigurationDto,
    /// 2D: two endpoints per wall. 3D: polygon vertices per wall, in order
    /// around the polygon. Empty when the wall misses the box.
    pub walls: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairCheck {
    pub a: usize,
    pub b: usize,
    pub report: VerificationReport,
    pub as_expected: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FigureData {
    pub id: u32,
    pub caption: &'static str,
    pub class: ClassId,
    pub seed: u64,
    /// Half-width of the clipping box.
    pub extent: f64,
    pub expected_verdict: PairVerdict,
    /// The rooms of the family coincide and only the trajectories differ.
    pub expected_rooms_congruent: bool,
    pub configurations: Vec<FigureConfiguration>,
    pub pairs: Vec<PairCheck>,
    pub passed: bool,
    #[serde(skip)]
    pub ppdm: Ppdm<f64>,
}

pub fn caption(id: u32) -> Option<&'static str> {
    Some(match id {
        3 => "Parallelogram rooms with the same PPDM.",
        4 => "Three equivalent infinitely long corridors.",
        5 => "Equivalent rooms with linear trajectories.",
        6 => "Three equivalent infinitely long and tall corridors.",
        7 => "Two hollow parallelepipeds with the same PPDM.",
        8 => "Two hollow prisms with the same PPDM: identical rooms, different waypoints.",
        9 => "A pair of equivalent rooms in 3D.",
        10 => "Equivalent rooms with three pairs of parallel walls.",
        11 => "Rooms with fewer than six walls in 3D in the same equivalence class.",
        12 => "Equivalent rooms with two groups of walls enclosing a prismatic surface.",
        13 => "Rooms with planar trajectories and the same PPDM.",
        _ => return None,
    })
}

type Family = (ClassId, Vec<(String, Configuration<f64>)>);

fn pts<R: Rng>(rng: &mut R, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..dim).map(|_| rng.gen_range(-1.5..1.5)).collect()).collect()
}

fn offs<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    (0..k).map(|_| rng.gen_range(1.5..3.0)).collect()
}

fn generate(class: ClassId, params: serde_json::Value) -> Result<GeneratedPair<f64>> {
    ClassSpec::<f64>::from_json(class, params)?.generate()
}

/// Reference plus the equivalent of every pair; all pairs must share the
/// same reference.
fn family(class: ClassId, pairs: Vec<GeneratedPair<f64>>, labels: &[&str]) -> Result<Family> {
    let reference = pairs[0].reference.clone();
    let mut out = vec![("reference".to_string(), reference.clone())];
    for (pair, label) in pairs.into_iter().zip(labels) {
        if pair.reference != reference {
            return Err(Error::invalid("family members were generated from different references"));
        }
        out.push((label.to_string(), pair.equivalent));
    }
    Ok((class, out))
}

/// `n = T n⁰`, `r = T⁻ᵀ r⁰`. The map must keep every normal at unit length.
pub fn apply_linear_equivalence(config: &Configuration<f64>, t: &DMatrix<f64>) -> Result<Configuration<f64>> {
    let tit = t
        .transpose()
        .try_inverse()
        .ok_or_else(|| Error::DegenerateClassParameters("map is singular".into()))?;
    let planes = config
        .planes()
        .iter()
        .map(|p| Plane::new(t * p.normal(), p.offset()))
        .collect::<Result<Vec<_>>>()?;
    let waypoints = config.waypoints().iter().map(|r| &tit * r).collect();
    Configuration::new(config.dim(), planes, waypoints)
}

/// Another two-sets map `[[a', b', 0], [0, e', 0], [0, 0, ±1]]` that keeps the
/// azimuths `φ1, φ2` on its unit-norm curve, for a chosen `a'`.
fn retarget_two_sets(phi1: f64, phi2: f64, a: f64, i_sign: f64) -> Result<DMatrix<f64>> {
    let (s1, s2) = (phi1.sin(), phi2.sin());
    let (k1, k2) = (phi1.cos() / s1, phi2.cos() / s2);
    // (a k_j + b)² + e² = 1 / s_j² for j = 1, 2; the difference is linear in b.
    let rhs = 1.0 / (s1 * s1) - 1.0 / (s2 * s2);
    let b = (rhs / (a * (k1 - k2)) - a * (k1 + k2)) / 2.0;
    let e2 = 1.0 / (s1 * s1) - (a * k1 + b).powi(2);
    if e2 <= 0.0 {
        return Err(Error::infeasible("e'² > 0", None, format!("e'² = {e2:e}")));
    }
    Ok(DMatrix::from_row_slice(3, 3, &[a, b, 0.0, 0.0, e2.sqrt(), 0.0, 0.0, 0.0, i_sign]))
}

fn build_family(id: u32, rng: &mut impl Rng) -> Result<Family> {
    match id {
        3 => {
            let c = ClassId::Rank2Parallelogram;
            let (o, w) = (offs(rng, 4), pts(rng, 4, 2));
            let pairs = [0.45, 0.7, 0.9]
                .iter()
                .map(|&d| generate(c, json!({"phi1": 0.0, "phi3": 1.2, "d": d, "offsets": o, "waypoints": w})))
                .collect::<Result<Vec<_>>>()?;
            family(c, pairs, &["d = 0.45", "d = 0.7", "d = 0.9"])
        }
        4 => {
            let c = ClassId::Rank1Corridor;
            let (o, w) = (offs(rng, 2), pts(rng, 5, 2));
            let pairs = (0..2)
                .map(|_| generate(c, json!({"a": 0.0, "offsets": o, "waypoints0": w, "free_coords": pts(rng, 5, 1).concat()})))
                .collect::<Result<Vec<_>>>()?;
            family(c, pairs, &["slid 1", "slid 2"])
        }
        5 => {
            let c = ClassId::Rank3LinearTrajectory;
            let angles = [0.2, 1.45, 2.6, 3.75, 5.0];
            let o = offs(rng, 5);
            let gammas = [-1.0, -0.2, 0.7, 1.4];
            let pairs = [0.3, -0.6]
                .iter()
                .map(|&a| {
                    generate(c, json!({"wall_angles": angles, "a": a, "b": 0.9, "c": 0.2, "offsets": o, "gammas": gammas}))
                })
                .collect::<Result<Vec<_>>>()?;
            family(c, pairs, &["a = 0.3", "a = -0.6"])
        }
        6 => {
            let c = ClassId::Rank1Corridor3D;
            let (o, w) = (offs(rng, 4), pts(rng, 5, 3));
            let pairs = (0..2)
                .map(|_| {
                    let yz: Vec<(f64, f64)> = pts(rng, 5, 2).into_iter().map(|p| (p[0], p[1])).collect();
                    generate(c, json!({"a": 0.0, "b": 0.0, "offsets": o, "waypoints0": w, "free_yz": yz}))
                })
                .collect::<Result<Vec<_>>>()?;
            family(c, pairs, &["slid 1", "slid 2"])
        }
        7 => {
            let c = ClassId::Rank2Parallelepiped;
            let pair = generate(
                c,
                json!({"a": 0.0, "b": 0.0, "phi1": 0.0, "phi3": 1.25, "f": 0.7,
                       "offsets": offs(rng, 4), "waypoints0": pts(rng, 5, 3),
                       "free_z": pts(rng, 5, 1).concat()}),
            )?;
            family(c, vec![pair], &["equivalent"])
        }
        8 => {
            let c = ClassId::Rank2Prism;
            let slide: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let pair = generate(
                c,
                json!({"a": 0.4, "b": -0.3, "azimuths": [0.3, 1.9, 3.4, 4.8],
                       "offsets": offs(rng, 4), "waypoints0": pts(rng, 5, 3), "slide": slide}),
            )?;
            family(c, vec![pair], &["equivalent"])
        }
        9 => {
            let c = ClassId::Rank3Misc;
            let az = [0.3, 1.2, 2.2, 3.3, 4.1, 5.0];
            let pair = generate(
                c,
                json!({"alpha": 1, "t": [1.2, 0.1, 0.1, 1.1, 0.05, 0.9], "azimuths": az,
                       "branches": [0, 1, 2, 3, 0, 2], "offsets": offs(rng, 6), "waypoints0": pts(rng, 5, 3)}),
            )?;
            family(c, vec![pair], &["equivalent"])
        }
        10 => {
            let c = ClassId::Rank3Misc;
            let walls = [(0.9, 0.2), (1.4, 2.1), (0.6, 4.0)];
            let (o, w) = (offs(rng, 6), pts(rng, 5, 3));
            let pairs = [(0.15, 0.1, -0.1), (-0.2, 0.05, 0.15)]
                .iter()
                .map(|&(b, cc, f)| {
                    let free: BTreeMap<&str, f64> = [("b", b), ("c", cc), ("f", f)].into();
                    generate(c, json!({"alpha": 2, "reference_walls": walls, "free_params": free, "offsets": o, "waypoints0": w}))
                })
                .collect::<Result<Vec<_>>>()?;
            family(c, pairs, &["equivalent 1", "equivalent 2"])
        }
        11 => {
            let c = ClassId::Rank3Misc;
            let walls = [(0.5, 0.1), (1.3, 1.4), (1.7, 2.6), (1.2, 3.9), (2.3, 5.1)];
            let (o, w) = (offs(rng, 5), pts(rng, 5, 3));
            let pairs = [0.2, -0.25]
                .iter()
                .map(|&b| {
                    generate(c, json!({"alpha": 1, "reference_walls": walls, "free_params": {"b": b}, "offsets": o, "waypoints0": w}))
                })
                .collect::<Result<Vec<_>>>()?;
            family(c, pairs, &["b = 0.2", "b = -0.25"])
        }
        12 => {
            let c = ClassId::Rank3TwoParallelSets;
            let (a, b, e) = (0.6, 0.5, 1.2);
            let pair = generate(
                c,
                json!({"a": a, "b": b, "e": e, "inclinations": [FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, 0.35, PI - 0.35],
                       "set_assignment": [0, 1, 2, 3, 0, 2], "offsets": offs(rng, 6), "waypoints0": pts(rng, 5, 3)}),
            )?;
            let phis = two_sets_azimuths(a, b, e)?;
            let t2 = retarget_two_sets(phis[0], phis[2], 0.8, 1.0)?;
            let second = apply_linear_equivalence(&pair.reference, &t2)?;
            let (class, mut members) = family(c, vec![pair], &["a = 0.6"])?;
            members.push(("a = 0.8".to_string(), second));
            Ok((class, members))
        }
        13 => {
            let c = ClassId::Rank4PlanarTrajectory;
            let walls: Vec<(f64, f64)> = (0..7)
                .map(|k| (rng.gen_range(0.3..PI - 0.3), k as f64 * 0.9 + rng.gen_range(0.0..0.5)))
                .collect();
            let (o, g) = (offs(rng, 7), pts(rng, 4, 2));
            let gammas: Vec<(f64, f64)> = g.iter().map(|p| (p[0], p[1])).collect();
            let pairs = [
                [1.1, 0.1, -0.1, 0.2, 0.05, 0.9, 0.1, -0.15],
                [1.1, 0.1, -0.1, -0.3, 0.05, 0.9, 0.1, 0.25],
            ]
            .iter()
            .map(|t| generate(c, json!({"reference_walls": walls, "t": t, "offsets": o, "gammas": gammas})))
            .collect::<Result<Vec<_>>>()?;
            family(c, pairs, &["equivalent 1", "equivalent 2"])
        }
        _ => Err(Error::invalid(format!("no figure {id}; reproducible figures are 3 to 13"))),
    }
}

/// Outline of plane `nᵀx = q` inside `[-l, l]^m`.
pub fn wall_outline(plane: &Plane<f64>, l: f64) -> Vec<Vec<f64>> {
    let n = plane.normal();
    let q = plane.offset();
    let foot = n * q;
    if n.len() == 2 {
        let dir = DVector::from_vec(vec![-n[1], n[0]]);
        // Clip foot + s·dir against each slab.
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..2 {
            if dir[i].abs() < 1e-15 {
                if foot[i].abs() > l {
                    return Vec::new();
                }
                continue;
            }
            let (a, b) = ((-l - foot[i]) / dir[i], (l - foot[i]) / dir[i]);
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
        }
        if lo > hi {
            return Vec::new();
        }
        return [lo, hi].iter().map(|&s| (&foot + &dir * s).iter().copied().collect()).collect();
    }
    // 3D: intersect the twelve cube edges, then order the hits by angle.
    let mut hits: Vec<DVector<f64>> = Vec::new();
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        for su in [-l, l] {
            for sv in [-l, l] {
                if n[axis].abs() < 1e-15 {
                    continue;
                }
                let x = (q - n[u] * su - n[v] * sv) / n[axis];
                if x.abs() <= l {
                    let mut p = DVector::zeros(3);
                    p[axis] = x;
                    p[u] = su;
                    p[v] = sv;
                    if hits.iter().all(|h| (h - &p).norm() > 1e-12) {
                        hits.push(p);
                    }
                }
            }
        }
    }
    if hits.len() < 3 {
        return Vec::new();
    }
    let centre = hits.iter().fold(DVector::zeros(3), |acc, h| acc + h) / hits.len() as f64;
    let helper = if n[0].abs() < 0.9 { DVector::from_vec(vec![1.0, 0.0, 0.0]) } else { DVector::from_vec(vec![0.0, 1.0, 0.0]) };
    let e1 = n.cross(&helper).normalize();
    let e2 = n.cross(&e1);
    let mut keyed: Vec<(f64, Vec<f64>)> = hits
        .iter()
        .map(|h| {
            let d = h - &centre;
            (d.dot(&e2).atan2(d.dot(&e1)), h.iter().copied().collect())
        })
        .collect();
    keyed.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    keyed.into_iter().map(|(_, p)| p).collect()
}

/// Builds, verifies and packages one figure. Reproducible for fixed
/// `(id, seed)`.
pub fn render_figure(id: u32, seed: u64) -> Result<FigureData> {
    let caption = caption(id).ok_or_else(|| Error::invalid(format!("no figure {id}; reproducible figures are 3 to 13")))?;
    let mut rng = stream_rng(seed, id as u64);
    let mut last = Error::invalid("no attempt made");
    let mut built = None;
    for _ in 0..100 {
        match build_family(id, &mut rng) {
            Ok(f) => {
                built = Some(f);
                break;
            }
            Err(e) => last = e,
        }
    }
    let (class, members) = built.ok_or(last)?;

    let expected_rooms_congruent = class.is_trajectory_only();
    let expected_verdict = PairVerdict::EqualPpdmDistinct;
    let mut pairs = Vec::new();
    for a in 0..members.len() {
        for b in a + 1..members.len() {
            let report = verify_pair(&members[a].1, &members[b].1)?;
            let as_expected = report.verdict == expected_verdict && report.rooms_congruent == expected_rooms_congruent;
            pairs.push(PairCheck { a, b, report, as_expected });
        }
    }
    let extent = 1.2 * members.iter().map(|(_, c)| c.bounding_radius()).fold(1.0, f64::max);
    let configurations = members
        .iter()
        .map(|(label, c)| FigureConfiguration {
            label: label.clone(),
            configuration: ConfigurationDto::from_configuration(c),
            walls: c.planes().iter().map(|p| wall_outline(p, extent)).collect(),
        })
        .collect();
    Ok(FigureData {
        id,
        caption,
        class,
        seed,
        extent,
        expected_verdict,
        expected_rooms_congruent,
        configurations,
        passed: pairs.iter().all(|p| p.as_expected),
        pairs,
        ppdm: compute_ppdm(&members[0].1),
    })
}
