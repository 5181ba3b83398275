use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::lattice::SiteRange;

pub const SNAPSHOT_SCHEMA: &str = "rwdre.snapshot.v1";

/// Exact counts over a box of sites at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    pub time: f64,
    pub range: SiteRange,
    /// Counts in [`SiteRange::for_each`] order.
    pub counts: Vec<u32>,
}

impl FieldSnapshot {
    fn offset(&self, site: &[i64]) -> Option<usize> {
        if !self.range.contains(site) {
            return None;
        }
        let mut off = 0usize;
        for a in (0..self.range.dim()).rev() {
            let w = (self.range.hi[a] - self.range.lo[a] + 1) as usize;
            off = off * w + (site[a] - self.range.lo[a]) as usize;
        }
        Some(off)
    }

    pub fn count(&self, site: &[i64]) -> Option<u32> {
        self.offset(site).map(|k| self.counts[k])
    }

    /// 1-d convenience accessor.
    pub fn count1(&self, x: i64) -> Option<u32> {
        self.count(&[x])
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// Sum over the 1-d interval `[lo, hi]`.
    pub fn interval_sum(&self, lo: i64, hi: i64) -> Result<u64> {
        if self.range.dim() != 1 || lo < self.range.lo[0] || hi > self.range.hi[0] {
            return Err(Error::OutOfRange(format!(
                "interval [{lo}, {hi}] outside snapshot window"
            )));
        }
        let base = self.range.lo[0];
        Ok(self.counts[(lo - base) as usize..=(hi - base) as usize]
            .iter()
            .map(|&c| c as u64)
            .sum())
    }
}

/// Header metadata of a snapshot table.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMeta {
    pub dim: usize,
    pub radius: i64,
    pub mu: f64,
    pub seed: u64,
}

fn axis_names(dim: usize) -> Vec<String> {
    match dim {
        1 => vec!["x".into()],
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        _ => (1..=dim).map(|a| format!("x{a}")).collect(),
    }
}

/// Writes snapshots as `time,x[,y,...],count` rows after one `#` header line.
///
/// Floats use the shortest representation that parses back to the same bits.
pub fn write_snapshots<W: Write>(
    out: &mut W,
    meta: &SnapshotMeta,
    snapshots: &[FieldSnapshot],
) -> std::io::Result<()> {
    writeln!(
        out,
        "# schema={SNAPSHOT_SCHEMA} d={} L={} mu={} seed={}",
        meta.dim, meta.radius, meta.mu, meta.seed
    )?;
    writeln!(out, "time,{},count", axis_names(meta.dim).join(","))?;
    for s in snapshots {
        let mut k = 0;
        let mut err = Ok(());
        s.range.for_each(|site| {
            if err.is_ok() {
                let coords: Vec<String> = site.iter().map(|c| c.to_string()).collect();
                err = writeln!(out, "{},{},{}", s.time, coords.join(","), s.counts[k]);
            }
            k += 1;
        });
        err?;
    }
    Ok(())
}

fn parse_meta(line: &str) -> Result<SnapshotMeta> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("snapshot table lacks a header line".into()))?;
    let mut schema = None;
    let (mut dim, mut radius, mut mu, mut seed) = (None, None, None, None);
    for kv in body.split_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header field {kv:?}")))?;
        let bad = |_| Error::Parse(format!("bad value in header field {kv:?}"));
        match k {
            "schema" => schema = Some(v.to_string()),
            "d" => dim = Some(v.parse::<usize>().map_err(|e| bad(e.to_string()))?),
            "L" => radius = Some(v.parse::<i64>().map_err(|e| bad(e.to_string()))?),
            "mu" => mu = Some(v.parse::<f64>().map_err(|e| bad(e.to_string()))?),
            "seed" => seed = Some(v.parse::<u64>().map_err(|e| bad(e.to_string()))?),
            _ => {}
        }
    }
    if schema.as_deref() != Some(SNAPSHOT_SCHEMA) {
        return Err(Error::Parse(format!(
            "unsupported snapshot schema {schema:?}"
        )));
    }
    match (dim, radius, mu, seed) {
        (Some(dim), Some(radius), Some(mu), Some(seed)) => Ok(SnapshotMeta {
            dim,
            radius,
            mu,
            seed,
        }),
        _ => Err(Error::Parse("snapshot header incomplete".into())),
    }
}

/// Parses a table written by [`write_snapshots`].
///
/// Rows sharing a time form one snapshot whose window is the bounding box of its rows.
pub fn read_snapshots<R: BufRead>(mut input: R) -> Result<(SnapshotMeta, Vec<FieldSnapshot>)> {
    let mut first = String::new();
    input
        .read_line(&mut first)
        .map_err(|e| Error::Parse(e.to_string()))?;
    let meta = parse_meta(first.trim_end())?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let d = meta.dim;
    let mut rows: Vec<(f64, Vec<i64>, u32)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != d + 2 {
            return Err(Error::Parse(format!("row has {} fields", rec.len())));
        }
        let p = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(e.to_string()));
        let t = p(&rec[0])?;
        let site = (0..d)
            .map(|a| rec[a + 1].parse::<i64>().map_err(|e| Error::Parse(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let c = rec[d + 1]
            .parse::<u32>()
            .map_err(|e| Error::Parse(e.to_string()))?;
        rows.push((t, site, c));
    }
    let mut snaps = Vec::new();
    let mut start = 0;
    while start < rows.len() {
        let t = rows[start].0;
        let mut end = start;
        while end < rows.len() && rows[end].0.to_bits() == t.to_bits() {
            end += 1;
        }
        let group = &rows[start..end];
        let mut lo = group[0].1.clone();
        let mut hi = group[0].1.clone();
        for (_, s, _) in group {
            for a in 0..d {
                lo[a] = lo[a].min(s[a]);
                hi[a] = hi[a].max(s[a]);
            }
        }
        let range = SiteRange { lo, hi };
        if range.len() != group.len() as u64 {
            return Err(Error::Parse(format!("snapshot at time {t} is not a full box")));
        }
        let mut snap = FieldSnapshot {
            time: t,
            counts: vec![0; group.len()],
            range,
        };
        for (_, s, c) in group {
            let k = snap.offset(s).expect("row inside its bounding box");
            snap.counts[k] = *c;
        }
        snaps.push(snap);
        start = end;
    }
    Ok((meta, snaps))
}
