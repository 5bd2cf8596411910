//! JSON model files and CSV observation/trajectory files.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::emission::{Emission, EmissionSpec};
use crate::model::lmsm::InitX;
use crate::model::sample::Trajectory;
use crate::model::{FinitePmm, Hmm, Lmsm, Model, Obs, ObsSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    FinitePmm {
        n_states: usize,
        n_obs: usize,
        trans: Vec<Vec<f64>>,
        init: Vec<f64>,
    },
    Hmm {
        #[serde(alias = "trans_p")]
        trans: Vec<Vec<f64>>,
        #[serde(alias = "init_y")]
        init: Vec<f64>,
        emissions: Vec<EmissionSpec>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        support_witnesses: Vec<Vec<f64>>,
    },
    Lmsm {
        #[serde(alias = "trans_p")]
        trans: Vec<Vec<f64>>,
        #[serde(alias = "init_y")]
        init: Vec<f64>,
        f_mats: Vec<Vec<Vec<f64>>>,
        noise: Vec<EmissionSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        init_x: Option<InitX>,
    },
}

impl ModelSpec {
    pub fn build(&self) -> Result<Model> {
        Ok(match self {
            ModelSpec::FinitePmm { n_states, n_obs, trans, init } => {
                Model::Finite(FinitePmm::new(*n_states, *n_obs, trans.clone(), init.clone())?)
            }
            ModelSpec::Hmm { trans, init, emissions, support_witnesses } => {
                let em = emissions.iter().map(Emission::from_spec).collect::<Result<Vec<_>>>()?;
                let mut m = Hmm::new(trans.clone(), init.clone(), em)?;
                m.support_witnesses = support_witnesses.clone();
                Model::Hmm(m)
            }
            ModelSpec::Lmsm { trans, init, f_mats, noise, init_x } => {
                let nz = noise.iter().map(Emission::from_spec).collect::<Result<Vec<_>>>()?;
                Model::Lmsm(Lmsm::new(trans.clone(), init.clone(), f_mats.clone(), nz, init_x.clone())?)
            }
        })
    }

    pub fn from_model(model: &Model) -> Self {
        match model {
            Model::Finite(m) => ModelSpec::FinitePmm {
                n_states: m.n_states(),
                n_obs: m.n_obs(),
                trans: m.trans_rows(),
                init: m.init().to_vec(),
            },
            Model::Hmm(m) => ModelSpec::Hmm {
                trans: m.trans().to_vec(),
                init: m.init().to_vec(),
                emissions: m.emissions().iter().map(Emission::to_spec).collect(),
                support_witnesses: m.support_witnesses.clone(),
            },
            Model::Lmsm(m) => ModelSpec::Lmsm {
                trans: m.trans().to_vec(),
                init: m.init().to_vec(),
                f_mats: m
                    .f_mats()
                    .iter()
                    .map(|f| (0..f.nrows()).map(|a| (0..f.ncols()).map(|b| f[(a, b)]).collect()).collect())
                    .collect(),
                noise: m.noise().iter().map(Emission::to_spec).collect(),
                init_x: Some(m.init_x().clone()),
            },
        }
    }
}

pub fn parse_model(json: &str) -> Result<Model> {
    let spec: ModelSpec = serde_json::from_str(json)?;
    spec.build()
}

pub fn load_model(path: &Path) -> Result<Model> {
    parse_model(&fs::read_to_string(path)?)
}

pub fn model_to_json(model: &Model) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ModelSpec::from_model(model))?)
}

fn parse_field(field: &str, space: ObsSpace, index: usize) -> Result<Obs> {
    let bad = |reason: String| Error::ObservationSpace { index, reason };
    match space {
        ObsSpace::Finite(k) => {
            let s: usize = field.trim().parse().map_err(|_| bad(format!("'{field}' is not a symbol index")))?;
            if s >= k {
                return Err(bad(format!("symbol {s} outside alphabet of size {k}")));
            }
            Ok(Obs::Symbol(s))
        }
        ObsSpace::Euclidean(d) => {
            let v = field
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad(format!("'{field}' is not a comma-separated vector")))?;
            if v.len() != d {
                return Err(bad(format!("expected {d} components, found {}", v.len())));
            }
            Ok(Obs::Point(v))
        }
    }
}

/// Reads the `x` column of a CSV file (observation or trajectory layout).
pub fn read_obs_csv<R: Read>(reader: R, space: ObsSpace) -> Result<Vec<Obs>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let col = rdr
        .headers()?
        .iter()
        .position(|h| h.trim() == "x")
        .ok_or_else(|| Error::Parse("observation CSV needs an 'x' column".into()))?;
    let mut out = Vec::new();
    for (index, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = rec.get(col).ok_or_else(|| Error::Parse(format!("row {} has no x field", index + 1)))?;
        out.push(parse_field(field, space, index)?);
    }
    Ok(out)
}

pub fn load_obs(path: &Path, space: ObsSpace) -> Result<Vec<Obs>> {
    read_obs_csv(fs::File::open(path)?, space)
}

pub fn write_obs_csv<W: Write>(writer: W, xs: &[Obs]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x"])?;
    for x in xs {
        w.write_record([x.to_field()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trajectory_csv<W: Write>(writer: W, traj: &Trajectory) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["t", "x", "y"])?;
    for (k, (x, y)) in traj.xs.iter().zip(&traj.ys).enumerate() {
        w.write_record([(k + 1).to_string(), x.to_field(), y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hmm_round_trip_and_aliases() {
        let json = r#"{"kind":"hmm","trans_p":[[0.9,0.1],[0.2,0.8]],"init_y":[0.5,0.5],
            "emissions":[{"kind":"categorical","weights":[1.0,0.0]},{"kind":"categorical","weights":[0.3,0.7]}]}"#;
        let m = parse_model(json).unwrap();
        assert_eq!(m.n_states(), 2);
        let back = parse_model(&model_to_json(&m).unwrap()).unwrap();
        assert_eq!(ModelSpec::from_model(&back), ModelSpec::from_model(&m));
    }

    #[test]
    fn vector_observations_survive_csv() {
        let xs = vec![Obs::Point(vec![1.5, -2.0]), Obs::Point(vec![0.0, 3.25])];
        let mut buf = Vec::new();
        write_obs_csv(&mut buf, &xs).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("\"1.5,-2\""));
        assert_eq!(read_obs_csv(&buf[..], ObsSpace::Euclidean(2)).unwrap(), xs);
    }

    #[test]
    fn out_of_alphabet_symbol_is_located() {
        let err = read_obs_csv("x\n0\n4\n".as_bytes(), ObsSpace::Finite(2)).unwrap_err();
        assert!(matches!(err, Error::ObservationSpace { index: 1, .. }));
    }
}
