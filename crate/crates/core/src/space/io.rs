//! JSON space files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FiniteLorentzSpace, SpaceError};
use crate::model::{Chart, ModelPoint};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointRecord {
    id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    chart: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
}

/// Causal entries may be written as booleans or as 0/1.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
enum Flag {
    Bool(bool),
    Int(u8),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceFile {
    points: Vec<PointRecord>,
    tau: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    causal: Option<Vec<Vec<Flag>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    chains: Vec<Vec<usize>>,
}

fn schema(path: String, message: impl Into<String>) -> SpaceError {
    SpaceError::Schema { path, message: message.into() }
}

pub fn from_json_str(text: &str) -> Result<FiniteLorentzSpace, SpaceError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: SpaceFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(if path == "." { "$".into() } else { path }, e.into_inner().to_string())
    })?;
    from_file(file)
}

fn from_file(file: SpaceFile) -> Result<FiniteLorentzSpace, SpaceError> {
    let n = file.points.len();
    let mut annotations: Vec<Option<Option<ModelPoint>>> = vec![None; n];
    for (i, p) in file.points.iter().enumerate() {
        if p.id >= n {
            return Err(schema(format!("points[{i}].id"), format!("id must lie in 0..{n}")));
        }
        if annotations[p.id].is_some() {
            return Err(schema(format!("points[{i}].id"), "duplicate id"));
        }
        annotations[p.id] = Some(annotation(i, p)?);
    }
    let annotations: Vec<Option<ModelPoint>> = annotations.into_iter().map(Option::flatten).collect();
    if annotations.iter().any(Option::is_some) && annotations.iter().any(Option::is_none) {
        return Err(schema("points".into(), "either every point or no point carries coordinates"));
    }

    let tau = flatten(&file.tau, n, "tau")?;
    let causal = match &file.causal {
        None => None,
        Some(rows) => {
            let flat = flatten(rows, n, "causal")?;
            let mut out = Vec::with_capacity(flat.len());
            for (idx, f) in flat.into_iter().enumerate() {
                out.push(match f {
                    Flag::Bool(b) => b,
                    Flag::Int(0) => false,
                    Flag::Int(1) => true,
                    Flag::Int(_) => {
                        return Err(schema(format!("causal[{}][{}]", idx / n, idx % n), "expected a boolean or 0/1"))
                    }
                });
            }
            Some(out)
        }
    };
    let space = FiniteLorentzSpace::build(annotations, tau, causal, file.chains)?;
    if space.annotations().iter().flatten().next().is_some() && space.model_curvature().is_none() {
        return Err(SpaceError::ChartMismatch);
    }
    Ok(space)
}

fn annotation(i: usize, p: &PointRecord) -> Result<Option<ModelPoint>, SpaceError> {
    let (name, coords) = match (&p.chart, &p.coords) {
        (None, None) => return Ok(None),
        (Some(name), Some(coords)) => (name, coords),
        _ => return Err(schema(format!("points[{i}]"), "chart and coords must appear together")),
    };
    let chart = Chart::from_name(name).ok_or_else(|| schema(format!("points[{i}].chart"), format!("unknown chart {name:?}")))?;
    if coords.len() != chart.dim() {
        return Err(schema(format!("points[{i}].coords"), format!("expected {} coordinates", chart.dim())));
    }
    let scale = p.scale.unwrap_or(1.0);
    if !(scale.is_finite() && scale > 0.0) {
        return Err(schema(format!("points[{i}].scale"), "scale must be positive"));
    }
    let mut c = [0.0; 3];
    c[..coords.len()].copy_from_slice(coords);
    Ok(Some(ModelPoint::new(chart, c, scale)))
}

fn flatten<T: Copy>(rows: &[Vec<T>], n: usize, name: &str) -> Result<Vec<T>, SpaceError> {
    if rows.len() != n {
        return Err(schema(name.into(), format!("expected {n} rows")));
    }
    let mut out = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(schema(format!("{name}[{i}]"), format!("expected {n} entries")));
        }
        out.extend_from_slice(row);
    }
    Ok(out)
}

pub fn to_json_string(s: &FiniteLorentzSpace) -> String {
    let n = s.len();
    let points = (0..n)
        .map(|id| match s.annotation(id) {
            Some(p) => PointRecord {
                id,
                chart: Some(p.chart.name().to_string()),
                coords: Some(p.coord_slice().to_vec()),
                scale: Some(p.scale),
            },
            None => PointRecord { id, chart: None, coords: None, scale: None },
        })
        .collect();
    let file = SpaceFile {
        points,
        tau: s.tau_matrix().chunks(n.max(1)).map(<[f64]>::to_vec).take(n).collect(),
        causal: Some(s.causal_matrix().chunks(n.max(1)).map(|r| r.iter().map(|&b| Flag::Bool(b)).collect()).take(n).collect()),
        chains: s.chains().iter().map(|c| c.ids.clone()).collect(),
    };
    serde_json::to_string_pretty(&file).expect("space files serialize")
}

pub fn read_space(path: &Path) -> Result<FiniteLorentzSpace, SpaceError> {
    from_json_str(&fs::read_to_string(path)?)
}

pub fn write_space(s: &FiniteLorentzSpace, path: &Path) -> Result<(), SpaceError> {
    fs::write(path, to_json_string(s))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ds_embed, Curvature};
    use crate::space::geodesic_lattice;

    #[test]
    fn empty_file() {
        let s = from_json_str(r#"{"points": [], "tau": []}"#).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn causal_defaults_to_closure_and_accepts_integers() {
        let text = r#"{"points": [{"id": 0}, {"id": 1}], "tau": [[0, 1], [0, 0]]}"#;
        let s = from_json_str(text).unwrap();
        assert!(s.leq(0, 1) && !s.leq(1, 0));
        let text = r#"{"points": [{"id": 0}, {"id": 1}], "tau": [[0, 0], [0, 0]], "causal": [[1, 1], [0, true]]}"#;
        let s = from_json_str(text).unwrap();
        assert!(s.leq(0, 1) && !s.ll(0, 1));
    }

    #[test]
    fn schema_errors_carry_paths() {
        let cases = [
            (r#"{"points": [{"id": 0}], "tau": [[0, 1]]}"#, "tau[0]"),
            (r#"{"points": [{"id": 0}], "tau": [["a"]]}"#, "tau[0][0]"),
            (r#"{"points": [{"id": 0}], "tau": [[-1]]}"#, "tau[0][0]"),
            (r#"{"points": [{"id": 3}], "tau": [[0]]}"#, "points[0].id"),
            (r#"{"points": [{"id": 0, "chart": "sphere", "coords": [0, 0]}], "tau": [[0]]}"#, "points[0].chart"),
            (r#"{"points": [{"id": 0}], "tau": [[0]], "chains": [[0, 4]]}"#, "chains[0][1]"),
            (r#"{"points": [{"id": 0}], "tau": [[0]], "causal": [[2]]}"#, "causal[0][0]"),
        ];
        for (text, want) in cases {
            match from_json_str(text) {
                Err(SpaceError::Schema { path, .. }) => assert_eq!(path, want, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn lattice_round_trip() {
        let k = Curvature::new(1.0);
        let hubs = [ds_embed(k, 0.0, 0.0), ds_embed(k, 1.0, -0.3), ds_embed(k, 2.0, 0.1)];
        let s = geodesic_lattice(k, &hubs, 3).unwrap();
        let back = from_json_str(&to_json_string(&s)).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.model_curvature().map(|k| k.value()), Some(1.0));
    }
}
