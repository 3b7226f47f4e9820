//! Equivalence classes of room–trajectory configurations sharing a PPDM.
//!
//! Every generator takes the free parameters of one class and returns a
//! reference configuration together with an equivalent one. Both have the
//! same PPDM but are not rigid copies of each other (the corridor and prism
//! classes differ only in their trajectories).

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::scalar::Real;

pub mod planar;
pub mod reductions;
pub mod spatial;

pub use planar::{CorridorParams, LinearTrajectory2dParams, ParallelogramParams};
pub use spatial::{
    Corridor3dParams, LinearTrajectory3dParams, ParallelepipedParams, PlanarTrajectoryParams, PrismParams,
    Rank3MiscParams, TwoParallelSetsParams,
};

/// Ambiguity class labels. All but [`ClassId::TooFewWalls`] have a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassId {
    Rank1Corridor,
    Rank2Parallelogram,
    Rank3LinearTrajectory,
    Rank1Corridor3D,
    Rank2Parallelepiped,
    Rank2Prism,
    Rank3Misc,
    Rank3TwoParallelSets,
    Rank4PlanarTrajectory,
    Rank5LinearTrajectory,
    /// Fewer than six walls in 3D.
    TooFewWalls,
}

impl ClassId {
    /// The ten classes that have generators, 2D first.
    pub const GENERATED: [ClassId; 10] = [
        ClassId::Rank1Corridor,
        ClassId::Rank2Parallelogram,
        ClassId::Rank3LinearTrajectory,
        ClassId::Rank1Corridor3D,
        ClassId::Rank2Parallelepiped,
        ClassId::Rank2Prism,
        ClassId::Rank3Misc,
        ClassId::Rank3TwoParallelSets,
        ClassId::Rank4PlanarTrajectory,
        ClassId::Rank5LinearTrajectory,
    ];

    pub fn dim(self) -> usize {
        match self {
            ClassId::Rank1Corridor | ClassId::Rank2Parallelogram | ClassId::Rank3LinearTrajectory => 2,
            _ => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassId::Rank1Corridor => "Rank1Corridor",
            ClassId::Rank2Parallelogram => "Rank2Parallelogram",
            ClassId::Rank3LinearTrajectory => "Rank3LinearTrajectory",
            ClassId::Rank1Corridor3D => "Rank1Corridor3D",
            ClassId::Rank2Parallelepiped => "Rank2Parallelepiped",
            ClassId::Rank2Prism => "Rank2Prism",
            ClassId::Rank3Misc => "Rank3Misc",
            ClassId::Rank3TwoParallelSets => "Rank3TwoParallelSets",
            ClassId::Rank4PlanarTrajectory => "Rank4PlanarTrajectory",
            ClassId::Rank5LinearTrajectory => "Rank5LinearTrajectory",
            ClassId::TooFewWalls => "TooFewWalls",
        }
    }

    /// Classes whose equivalent room is a rigid copy of the reference room;
    /// only the trajectory changes.
    pub fn is_trajectory_only(self) -> bool {
        matches!(self, ClassId::Rank1Corridor | ClassId::Rank1Corridor3D | ClassId::Rank2Prism)
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim();
        ClassId::GENERATED
            .iter()
            .chain(std::iter::once(&ClassId::TooFewWalls))
            .find(|c| c.name().eq_ignore_ascii_case(wanted))
            .copied()
            .ok_or_else(|| Error::invalid(format!("unknown class id `{wanted}`")))
    }
}

/// Output of a generator.
#[derive(Debug, Clone)]
pub struct GeneratedPair<T: Real> {
    pub class: ClassId,
    pub reference: Configuration<T>,
    pub equivalent: Configuration<T>,
    /// Linear map taking reference normals to equivalent normals, when the
    /// class has one (`n = T n⁰`).
    pub transform: Option<DMatrix<T>>,
    /// Rotation relating the rooms of the prism class.
    pub rotation: Option<DMatrix<T>>,
}

impl<T: Real> GeneratedPair<T> {
    /// Reference and equivalent swapped. The pair still shares its PPDM.
    pub fn swapped(self) -> Self {
        Self {
            class: self.class,
            reference: self.equivalent,
            equivalent: self.reference,
            transform: self.transform.and_then(|t| t.try_inverse()),
            rotation: self.rotation.map(|r| r.transpose()),
        }
    }
}

/// Class identifier together with that class's parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", content = "params", bound(deserialize = "T: Real"))]
pub enum ClassSpec<T> {
    Rank1Corridor(CorridorParams<T>),
    Rank2Parallelogram(ParallelogramParams<T>),
    Rank3LinearTrajectory(LinearTrajectory2dParams<T>),
    Rank1Corridor3D(Corridor3dParams<T>),
    Rank2Parallelepiped(ParallelepipedParams<T>),
    Rank2Prism(PrismParams<T>),
    Rank3Misc(Rank3MiscParams<T>),
    Rank3TwoParallelSets(TwoParallelSetsParams<T>),
    Rank4PlanarTrajectory(PlanarTrajectoryParams<T>),
    Rank5LinearTrajectory(LinearTrajectory3dParams<T>),
}

impl<T: Real> ClassSpec<T> {
    pub fn class_id(&self) -> ClassId {
        match self {
            ClassSpec::Rank1Corridor(_) => ClassId::Rank1Corridor,
            ClassSpec::Rank2Parallelogram(_) => ClassId::Rank2Parallelogram,
            ClassSpec::Rank3LinearTrajectory(_) => ClassId::Rank3LinearTrajectory,
            ClassSpec::Rank1Corridor3D(_) => ClassId::Rank1Corridor3D,
            ClassSpec::Rank2Parallelepiped(_) => ClassId::Rank2Parallelepiped,
            ClassSpec::Rank2Prism(_) => ClassId::Rank2Prism,
            ClassSpec::Rank3Misc(_) => ClassId::Rank3Misc,
            ClassSpec::Rank3TwoParallelSets(_) => ClassId::Rank3TwoParallelSets,
            ClassSpec::Rank4PlanarTrajectory(_) => ClassId::Rank4PlanarTrajectory,
            ClassSpec::Rank5LinearTrajectory(_) => ClassId::Rank5LinearTrajectory,
        }
    }

    /// Parses the parameter object of `class` from JSON.
    pub fn from_json(class: ClassId, params: serde_json::Value) -> Result<Self> {
        let tagged = serde_json::json!({ "class": class.name(), "params": params });
        serde_json::from_value(tagged).map_err(|e| Error::Parse(format!("{class} parameters: {e}")))
    }

    pub fn generate(&self) -> Result<GeneratedPair<T>> {
        match self {
            ClassSpec::Rank1Corridor(p) => planar::gen_corridor_pair(p),
            ClassSpec::Rank2Parallelogram(p) => planar::gen_parallelogram_pair(p),
            ClassSpec::Rank3LinearTrajectory(p) => planar::gen_linear_trajectory_pair_2d(p),
            ClassSpec::Rank1Corridor3D(p) => spatial::gen_corridor3d_pair(p),
            ClassSpec::Rank2Parallelepiped(p) => spatial::gen_parallelepiped_pair(p),
            ClassSpec::Rank2Prism(p) => spatial::gen_prism_pair(p),
            ClassSpec::Rank3Misc(p) => spatial::gen_rank3_pair(p),
            ClassSpec::Rank3TwoParallelSets(p) => spatial::gen_two_parallel_sets_pair(p),
            ClassSpec::Rank4PlanarTrajectory(p) => spatial::gen_planar_trajectory_pair(p),
            ClassSpec::Rank5LinearTrajectory(p) => spatial::gen_linear_trajectory3d_pair(p),
        }
    }
}

/// Turns parameter point lists into vectors of dimension `dim`.
pub(crate) fn points<T: Real>(dim: usize, raw: &[Vec<T>], what: &str) -> Result<Vec<DVector<T>>> {
    if raw.is_empty() {
        return Err(Error::invalid(format!("{what}: at least one point is required")));
    }
    raw.iter()
        .map(|p| {
            if p.len() != dim {
                Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                })
            } else {
                Ok(DVector::from_column_slice(p))
            }
        })
        .collect()
}

pub(crate) fn expect_len<X>(items: &[X], expected: usize, what: &str) -> Result<()> {
    if items.len() == expected {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what}: expected {expected} entries, found {}", items.len())))
    }
}

/// `true` when `t` is diagonal with ±1 entries, i.e. a pure reflection
/// or the identity.
pub(crate) fn is_sign_diagonal<T: Real>(t: &DMatrix<T>, tol: T) -> bool {
    (0..t.nrows()).all(|i| {
        (0..t.ncols()).all(|j| {
            let x = t[(i, j)];
            if i == j {
                (x.abs() - T::one()).abs() <= tol
            } else {
                x.abs() <= tol
            }
        })
    })
}
