//! Named built-in boundary data.

use std::collections::BTreeMap;

use halfspace::quadrature::BoundaryData;
use halfspace::sharpness::{compute_constants, data_balls_super_extension, data_half_balls, super_ball_amplitudes};

pub const NAMES: [&str; 9] = [
    "bump",
    "bump_train",
    "constant",
    "exp_decay",
    "poly_growth",
    "poly_growth_outside",
    "radial_bump",
    "sharpness_half_balls",
    "sharpness_super_balls",
];

/// `key=value` parameters of a data selection; lists are comma separated.
#[derive(Debug, Default, Clone)]
pub struct DataParams(BTreeMap<String, String>);

impl DataParams {
    pub fn parse(items: &[String]) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        for item in items {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| format!("data parameter '{item}' is not of the form key=value"))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self(map))
    }

    fn scalar(&self, key: &str, default: Option<f64>) -> Result<f64, String> {
        match self.0.get(key) {
            Some(v) => v.parse().map_err(|_| format!("data parameter {key}: '{v}' is not a number")),
            None => default.ok_or_else(|| format!("data parameter {key} is required")),
        }
    }

    fn count(&self, key: &str, default: usize) -> Result<usize, String> {
        match self.0.get(key) {
            Some(v) => v.parse().map_err(|_| format!("data parameter {key}: '{v}' is not a count")),
            None => Ok(default),
        }
    }

    fn list(&self, key: &str, default: Option<Vec<f64>>) -> Result<Vec<f64>, String> {
        match self.0.get(key) {
            Some(v) => parse_list(v).map_err(|e| format!("data parameter {key}: {e}")),
            None => default.ok_or_else(|| format!("data parameter {key} is required")),
        }
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), String> {
        match self.0.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(format!("unknown data parameter '{k}' (expected one of: {})", allowed.join(", "))),
            None => Ok(()),
        }
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number")))
        .collect()
}

/// Builds data on `ℝ^{dim}`. `lambda` and `m` feed the sharpness
/// constructions.
pub fn build(name: &str, p: &DataParams, dim: usize, lambda: f64, m: u32) -> Result<BoundaryData, String> {
    let lib = |r: halfspace::error::Result<BoundaryData>| r.map_err(|e| e.to_string());
    match name {
        "bump" => {
            p.check_keys(&["center", "radius", "amplitude"])?;
            let center = p.list("center", Some(vec![0.0; dim]))?;
            if center.len() != dim {
                return Err(format!("bump center needs {dim} coordinates"));
            }
            lib(BoundaryData::bump(&center, p.scalar("radius", Some(1.0))?, p.scalar("amplitude", Some(1.0))?))
        }
        "bump_train" => {
            p.check_keys(&["count", "first", "ratio", "radius", "g"])?;
            lib(BoundaryData::bump_train(
                dim,
                p.count("count", 3)?,
                p.scalar("first", Some(4.0))?,
                p.scalar("ratio", Some(4.0))?,
                p.scalar("radius", Some(1.0))?,
                p.scalar("g", Some(0.0))?,
            ))
        }
        "constant" => {
            p.check_keys(&["value"])?;
            lib(BoundaryData::constant(dim, p.scalar("value", Some(1.0))?))
        }
        "exp_decay" => {
            p.check_keys(&[])?;
            lib(BoundaryData::exp_decay(dim))
        }
        "poly_growth" => {
            p.check_keys(&["g"])?;
            lib(BoundaryData::poly_growth(dim, p.scalar("g", None)?))
        }
        "poly_growth_outside" => {
            p.check_keys(&["g", "r_in"])?;
            lib(BoundaryData::poly_growth_outside(dim, p.scalar("g", None)?, p.scalar("r_in", Some(2.0))?))
        }
        "radial_bump" => {
            p.check_keys(&["inner", "outer"])?;
            lib(BoundaryData::radial_bump(dim, p.scalar("inner", Some(0.5))?, p.scalar("outer", Some(3.0))?))
        }
        "sharpness_half_balls" => {
            p.check_keys(&["centers", "psi", "d7"])?;
            let centers = p.list("centers", Some(vec![4.0, 16.0]))?;
            let default_psi = centers
                .iter()
                .enumerate()
                .map(|(i, c)| c.powi(m as i32) / ((i + 1) as f64).powi(2))
                .collect();
            let psi = p.list("psi", Some(default_psi))?;
            let d7 = p.scalar("d7", Some(1.0))?;
            data_half_balls(dim, &psi, &centers, lambda, m, d7)
                .map(|d| d.data)
                .map_err(|e| e.to_string())
        }
        "sharpness_super_balls" => {
            p.check_keys(&["a", "b", "d9"])?;
            let a = p.list("a", Some(vec![20.0, 60.0]))?;
            let b = p.list("b", Some(vec![1.5, 4.5]))?;
            if a.len() != b.len() {
                return Err("sharpness_super_balls needs as many radii b as centres a".into());
            }
            let d9 = p.scalar("d9", Some(1.0))?;
            let c = compute_constants(lambda, m).map_err(|e| e.to_string())?;
            let amps = super_ball_amplitudes(&a, &b, lambda, m, dim + 1, d9);
            data_balls_super_extension(dim, &a, &b, &amps, &c)
                .map(|d| d.data)
                .map_err(|e| e.to_string())
        }
        other => Err(format!("unknown data '{other}' (expected one of: {})", NAMES.join(", "))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_parameters() {
        let p = DataParams::parse(&["center=2.5,1".into(), "radius=0.5".into()]).unwrap();
        let f = build("bump", &p, 2, 1.5, 0).unwrap();
        assert_eq!(f.eval(&[2.5, 1.0]), 1.0);
        assert!(build("bump", &p, 3, 1.5, 0).is_err());
        assert!(build("bump", &DataParams::parse(&["size=1".into()]).unwrap(), 2, 1.5, 0).is_err());
        assert!(build("nope", &DataParams::default(), 2, 1.5, 0).is_err());
    }
}
