use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{empirical_speed, GeneratorTrace, GreenPath};
use crate::error::{Error, Result};

pub const PATH_SCHEMA: &str = "rwdre.path.v1";

/// JSON companion of a path table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSidecar {
    pub schema: String,
    pub config_hash: String,
    pub seed: u64,
    pub dim: usize,
    pub horizon: f64,
    pub occupied_time: f64,
    pub residual: Vec<f64>,
    pub speed: Vec<f64>,
}

impl PathSidecar {
    pub fn new(path: &GreenPath, trace: &GeneratorTrace, config_hash: &str, seed: u64) -> Self {
        PathSidecar {
            schema: PATH_SCHEMA.into(),
            config_hash: config_hash.into(),
            seed,
            dim: path.dim,
            horizon: path.horizon,
            occupied_time: path.occupied_time,
            residual: trace.residual.clone(),
            speed: empirical_speed(path),
        }
    }
}

fn axis_header(dim: usize) -> Vec<String> {
    match dim {
        1 => vec!["x".into()],
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        _ => (1..=dim).map(|a| format!("x{a}")).collect(),
    }
}

/// Writes `jump_index,time,x[,y,z],saw_red`, one row per jump.
pub fn write_path_csv<W: Write>(out: W, path: &GreenPath) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["jump_index".to_string(), "time".to_string()];
    header.extend(axis_header(path.dim));
    header.push("saw_red".into());
    w.write_record(&header)?;
    for k in 0..path.jumps() {
        let mut row = vec![(k + 1).to_string(), path.jump_times[k].to_string()];
        row.extend(path.position(k).iter().map(|c| c.to_string()));
        row.push(u8::from(path.saw_red[k]).to_string());
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<path csv>", e))?;
    Ok(())
}

/// Rebuilds a path from its table and sidecar.
pub fn read_path_csv<R: Read>(input: R, sidecar: &PathSidecar) -> Result<GreenPath> {
    if sidecar.schema != PATH_SCHEMA {
        return Err(Error::Parse(format!("unsupported path schema {}", sidecar.schema)));
    }
    let d = sidecar.dim;
    let mut rdr = csv::Reader::from_reader(input);
    let mut path = GreenPath {
        dim: d,
        horizon: sidecar.horizon,
        jump_times: Vec::new(),
        positions: Vec::new(),
        saw_red: Vec::new(),
        occupied_time: sidecar.occupied_time,
    };
    let perr = |e: &dyn std::fmt::Display| Error::Parse(e.to_string());
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != d + 3 {
            return Err(Error::Parse(format!("path row has {} fields", rec.len())));
        }
        path.jump_times
            .push(rec[1].parse::<f64>().map_err(|e| perr(&e))?);
        for a in 0..d {
            path.positions
                .push(rec[2 + a].parse::<i64>().map_err(|e| perr(&e))?);
        }
        path.saw_red.push(&rec[2 + d] == "1");
    }
    Ok(path)
}
