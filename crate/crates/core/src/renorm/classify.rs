use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::geometry::{BlockGeometry, BlockGrid};
use super::params::RenormParams;
use super::sweep::{BlockRecord, BlockSweep, LayerRange};
use crate::environment::{EventLog, EventSink};
use crate::error::{Error, Result};

pub const BLOCKS_SCHEMA: &str = "rwdre.blocks.v1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockLabel {
    pub bad: bool,
    pub occupied: bool,
    pub min_u: u32,
    pub witness: Option<(i64, f64)>,
}

impl From<&BlockRecord> for BlockLabel {
    fn from(r: &BlockRecord) -> Self {
        BlockLabel {
            bad: r.bad,
            occupied: r.occupied,
            min_u: r.min_u,
            witness: r.witness(),
        }
    }
}

/// Labels of a set of blocks. Blocks without a label are treated as good.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockClassification {
    pub geometry: BlockGeometry,
    pub threshold: f64,
    pub labels: BTreeMap<(i64, i64), BlockLabel>,
}

impl BlockClassification {
    pub fn new(geometry: BlockGeometry, threshold: f64) -> Self {
        BlockClassification {
            geometry,
            threshold,
            labels: BTreeMap::new(),
        }
    }

    /// All blocks of `grid` with the given badness, occupied, without witnesses.
    pub fn uniform(grid: &BlockGrid, bad: bool) -> Self {
        let mut c = BlockClassification::new(grid.geometry, f64::NAN);
        for (i, j) in grid.blocks() {
            c.labels.insert(
                (i, j),
                BlockLabel {
                    bad,
                    occupied: true,
                    min_u: 0,
                    witness: None,
                },
            );
        }
        c
    }

    pub fn insert(&mut self, rec: &BlockRecord) {
        self.labels.insert((rec.i, rec.j), BlockLabel::from(rec));
    }

    pub fn label(&self, i: i64, j: i64) -> Option<&BlockLabel> {
        self.labels.get(&(i, j))
    }

    pub fn is_bad(&self, i: i64, j: i64) -> bool {
        self.labels.get(&(i, j)).is_some_and(|l| l.bad)
    }

    pub fn bad_count(&self) -> usize {
        self.labels.values().filter(|l| l.bad).count()
    }

    /// CSV `r,i,j,label,occupied,witness_x,witness_t` preceded by a schema line.
    pub fn write_csv<W: Write>(&self, r: u32, out: W) -> Result<()> {
        let mut out = out;
        writeln!(out, "# schema={BLOCKS_SCHEMA}").map_err(|e| Error::io("<blocks>", e))?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "i", "j", "label", "occupied", "witness_x", "witness_t"])?;
        for (&(i, j), l) in &self.labels {
            let (wx, wt) = match l.witness {
                Some((x, t)) => (x.to_string(), t.to_string()),
                None => (String::new(), String::new()),
            };
            w.write_record([
                r.to_string(),
                i.to_string(),
                j.to_string(),
                if l.bad { "bad" } else { "good" }.to_string(),
                l.occupied.to_string(),
                wx,
                wt,
            ])?;
        }
        w.flush().map_err(|e| Error::io("<blocks>", e))?;
        Ok(())
    }
}

/// Tracked range for a batch over the whole grid.
fn grid_range(grid: &BlockGrid) -> LayerRange {
    let g = grid.geometry;
    LayerRange {
        win_lo: (grid.i_lo - 3) * g.delta,
        win_hi: (grid.i_hi + 4) * g.delta - g.window,
        cov_lo: grid.i_lo * g.delta,
        cov_hi: (grid.i_hi + 1) * g.delta - 1,
    }
}

/// Classifies every block of `grid` from a full-torus event log.
///
/// Window minima are exact over continuous time: a window count is piecewise
/// constant and only changes at logged events touching it.
pub fn classify_blocks(log: &EventLog, grid: &BlockGrid, params: &RenormParams) -> Result<BlockClassification> {
    classify_with_threshold(log, grid, params.bad_threshold())
}

pub fn classify_with_threshold(log: &EventLog, grid: &BlockGrid, threshold: f64) -> Result<BlockClassification> {
    let (t0, t1) = grid.field_span();
    log.covers(t0, t1)?;
    let torus = log.torus()?;
    let g = grid.geometry;
    let mut sweep = BlockSweep::new(&torus, g, threshold, grid.origin)?;
    sweep.reserve(log.initial.len());
    for (p, &site) in log.initial.iter().enumerate() {
        sweep.place(p as u32, site);
    }
    let range = grid_range(grid);
    let mut out = BlockClassification::new(g, threshold);
    let mut events = log.events.iter().peekable();
    for layer in -1..=grid.layers {
        let boundary = grid.origin + (layer * g.delta) as f64;
        while let Some(e) = events.next_if(|e| e.time < boundary) {
            sweep.on_move(e.time, e.particle, e.from, e.to);
        }
        if layer >= 1 {
            for rec in sweep.classify_current(grid.i_lo..=grid.i_hi)? {
                out.insert(&rec);
            }
        }
        if layer < grid.layers {
            sweep.start_layer(layer, range)?;
        }
    }
    Ok(out)
}
