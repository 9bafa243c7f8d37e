//! JSON-lines persistence of configurations, one point per line.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::sampler::{configuration_from_bodies, Configuration};
use super::window::Window;
use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Rotation, Shape, Vector};

#[derive(Serialize, Deserialize)]
struct PointRecord {
    id: usize,
    location: Vector,
    #[serde(flatten)]
    shape: Shape,
    rotation: Rotation,
    palm: bool,
}

pub fn write_points_jsonl<W: Write>(config: &Configuration, mut out: W) -> Result<()> {
    for p in &config.points {
        let rec = PointRecord {
            id: p.id,
            location: p.location,
            shape: p.grain.shape().clone(),
            rotation: *p.grain.rotation(),
            palm: p.palm,
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads points written by [`write_points_jsonl`]. Ids must run `0, 1, 2, ...`.
pub fn read_points_jsonl<R: BufRead>(window: &Window, input: R) -> Result<Configuration> {
    let mut bodies = Vec::new();
    let mut palm = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: PointRecord = serde_json::from_str(&line)?;
        if rec.id != bodies.len() {
            return Err(Error::invalid(format!("line {}: expected id {}", n + 1, bodies.len())));
        }
        bodies.push(ConvexBody::from_parts(rec.shape, rec.location, rec.rotation)?);
        palm.push(rec.palm);
    }
    configuration_from_bodies(window, bodies, &palm)
}
