//! Delimited trace files.

use std::io::{Read, Write};

use crate::error::LoadError;
use crate::sim::episode::TraceRow;

const FIXED: [&str; 9] = [
    "t",
    "x",
    "y",
    "theta",
    "cmd_vx",
    "cmd_vy",
    "cmd_omega",
    "source",
    "collision",
];

/// One row per simulator step; agent positions follow as `agentK_x,agentK_y`.
pub fn write_trace<W: Write>(rows: &[TraceRow], out: W) -> csv::Result<()> {
    let n_agents = rows.first().map_or(0, |r| r.agents.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = FIXED.iter().map(|s| s.to_string()).collect();
    for k in 0..n_agents {
        header.push(format!("agent{k}_x"));
        header.push(format!("agent{k}_y"));
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.t.to_string(),
            r.x.to_string(),
            r.y.to_string(),
            r.theta.to_string(),
            r.cmd_vx.to_string(),
            r.cmd_vy.to_string(),
            r.cmd_omega.to_string(),
            r.source.clone(),
            (r.collision as u8).to_string(),
        ];
        for a in &r.agents {
            rec.push(a[0].to_string());
            rec.push(a[1].to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace<R: Read>(input: R) -> Result<Vec<TraceRow>, LoadError> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd
        .headers()
        .map_err(|e| LoadError::Parse(e.to_string()))?
        .clone();
    if header.len() < FIXED.len() || header.iter().zip(FIXED).any(|(a, b)| a != b) {
        if header.is_empty() {
            return Ok(Vec::new());
        }
        return Err(LoadError::Parse("unexpected trace header".into()));
    }
    let n_agents = (header.len() - FIXED.len()) / 2;
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| LoadError::Parse(e.to_string()))?;
        let f = |i: usize| -> Result<f64, LoadError> {
            rec.get(i)
                .ok_or_else(|| LoadError::Parse("short trace row".into()))?
                .parse::<f64>()
                .map_err(|e| LoadError::Parse(e.to_string()))
        };
        let agents = (0..n_agents)
            .map(|k| Ok([f(FIXED.len() + 2 * k)?, f(FIXED.len() + 2 * k + 1)?]))
            .collect::<Result<Vec<_>, LoadError>>()?;
        rows.push(TraceRow {
            t: f(0)?,
            x: f(1)?,
            y: f(2)?,
            theta: f(3)?,
            cmd_vx: f(4)?,
            cmd_vy: f(5)?,
            cmd_omega: f(6)?,
            source: rec.get(7).unwrap_or_default().to_string(),
            collision: f(8)? != 0.0,
            agents,
        });
    }
    Ok(rows)
}
