//! File formats: configurations as JSON, PPDMs as CSV.
//!
//! Configuration JSON:
//! `{"dimension": 3, "planes": [{"normal": [..], "offset": q}], "waypoints": [[..]]}`.
//! PPDM CSV: one header row `wall_1,...,wall_K`, then one row per waypoint.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Configuration, Plane, Ppdm};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneDto {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationDto {
    pub dimension: usize,
    pub planes: Vec<PlaneDto>,
    pub waypoints: Vec<Vec<f64>>,
}

impl ConfigurationDto {
    pub fn from_configuration<T: Real>(c: &Configuration<T>) -> Self {
        Self {
            dimension: c.dim(),
            planes: c
                .planes()
                .iter()
                .map(|p| PlaneDto {
                    normal: p.normal().iter().map(|x| x.as_f64()).collect(),
                    offset: p.offset().as_f64(),
                })
                .collect(),
            waypoints: c.waypoints().iter().map(|w| w.iter().map(|x| x.as_f64()).collect()).collect(),
        }
    }

    /// Normals that are not already unit length are renormalized.
    pub fn to_configuration<T: Real>(&self) -> Result<Configuration<T>> {
        let conv = |v: &[f64]| DVector::from_iterator(v.len(), v.iter().map(|&x| T::lit(x)));
        let planes = self
            .planes
            .iter()
            .map(|p| {
                if p.normal.len() != self.dimension {
                    return Err(Error::DimensionMismatch {
                        expected: self.dimension,
                        found: p.normal.len(),
                    });
                }
                let n = conv(&p.normal);
                Plane::new(n.clone(), T::lit(p.offset)).or_else(|_| Plane::from_direction(n, T::lit(p.offset)))
            })
            .collect::<Result<Vec<_>>>()?;
        let waypoints = self.waypoints.iter().map(|w| conv(w)).collect();
        Configuration::new(self.dimension, planes, waypoints)
    }
}

pub fn configuration_to_json<T: Real>(c: &Configuration<T>) -> String {
    serde_json::to_string_pretty(&ConfigurationDto::from_configuration(c)).expect("plain data serializes")
}

pub fn configuration_from_json<T: Real>(text: &str) -> Result<Configuration<T>> {
    let dto: ConfigurationDto = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    dto.to_configuration()
}

pub fn ppdm_to_csv<T: Real>(d: &Ppdm<T>) -> String {
    let mut out = (1..=d.n_walls()).map(|k| format!("wall_{k}")).collect::<Vec<_>>().join(",");
    out.push('\n');
    for row in d.entries().row_iter() {
        let line: Vec<String> = row.iter().map(|x| format!("{:.16e}", x.as_f64())).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Reads a PPDM; a first line that does not parse as numbers is taken as
/// the header. Blank lines are ignored.
pub fn ppdm_from_csv<T: Real>(text: &str) -> Result<Ppdm<T>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        match parsed {
            Ok(v) => rows.push(v),
            Err(_) if rows.is_empty() && i == 0 => continue,
            Err(e) => return Err(Error::Parse(format!("line {}: {e}", i + 1))),
        }
    }
    let Some(first) = rows.first() else {
        return Err(Error::Parse("no numeric rows".into()));
    };
    let k = first.len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != k) {
        return Err(Error::Parse(format!("row {} has {} columns, expected {k}", i + 1, r.len())));
    }
    let m = DMatrix::from_fn(rows.len(), k, |i, j| T::lit(rows[i][j]));
    Ppdm::from_matrix(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::compute_ppdm;

    fn sample() -> Configuration<f64> {
        let planes = vec![
            Plane::from_angle(0.3, 1.0),
            Plane::from_angle(1.9, -0.5),
            Plane::from_angle(4.0, 2.0),
        ];
        let pts = vec![DVector::from_vec(vec![0.1, 0.2]), DVector::from_vec(vec![-1.0 / 3.0, 0.7])];
        Configuration::new(2, planes, pts).unwrap()
    }

    #[test]
    fn json_round_trip_is_exact() {
        let c = sample();
        let back: Configuration<f64> = configuration_from_json(&configuration_to_json(&c)).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let d = compute_ppdm(&sample());
        let text = ppdm_to_csv(&d);
        assert!(text.starts_with("wall_1,wall_2,wall_3\n"));
        let back: Ppdm<f64> = ppdm_from_csv(&text).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn bad_inputs_are_parse_errors() {
        assert_eq!(ppdm_from_csv::<f64>("1,2\n3\n").unwrap_err().kind(), "Parse");
        assert_eq!(ppdm_from_csv::<f64>("a,b\n").unwrap_err().kind(), "Parse");
        assert_eq!(configuration_from_json::<f64>("{").unwrap_err().kind(), "Parse");
        let wrong = r#"{"dimension":2,"planes":[{"normal":[1,0,0],"offset":0}],"waypoints":[]}"#;
        assert_eq!(configuration_from_json::<f64>(wrong).unwrap_err().kind(), "DimensionMismatch");
    }
}
