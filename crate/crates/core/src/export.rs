//! Stream a world's edit log to a block-placement HTTP endpoint.
//!
//! `GET {base}/buildarea` returns the target rectangle as
//! `{"xFrom", "yFrom", "zFrom", "xTo", "yTo", "zTo"}` (inclusive). Edits are
//! then sent as `PUT {base}/blocks` requests, one `x y z block` line per
//! edit, with world x/z shifted by the build-area origin.

use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::{Edit, VoxelWorld};

pub const MAX_BATCH: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BuildArea {
    pub x_from: i64,
    pub y_from: i64,
    pub z_from: i64,
    pub x_to: i64,
    pub y_to: i64,
    pub z_to: i64,
}

impl BuildArea {
    pub fn width(&self) -> usize {
        (self.x_to - self.x_from + 1).max(0) as usize
    }

    pub fn length(&self) -> usize {
        (self.z_to - self.z_from + 1).max(0) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportOptions {
    pub batch_size: usize,
    /// Extra attempts per batch after the first failure.
    pub retries: u32,
    pub backoff: Duration,
    pub timeout: Duration,
}

impl Default for ExportOptions {
    fn default() -> Self {
        ExportOptions {
            batch_size: MAX_BATCH,
            retries: 3,
            backoff: Duration::from_millis(200),
            timeout: Duration::from_secs(30),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportReport {
    pub placed: usize,
    pub failed: usize,
    pub batches: usize,
    pub retries: usize,
    pub requests: usize,
}

fn edit_line(e: &Edit, area: &BuildArea) -> String {
    format!(
        "{} {} {} {}",
        e.x as i64 + area.x_from,
        e.y,
        e.z as i64 + area.z_from,
        e.block
    )
}

fn base_url(endpoint: &str) -> &str {
    endpoint.trim_end_matches('/')
}

/// Query the build area, check it covers the world, then send the edit log
/// in batches. A batch that keeps failing after all retries is counted as
/// failed and the export moves on.
pub fn export_http(world: &VoxelWorld, endpoint: &str, opts: &ExportOptions) -> Result<ExportReport> {
    if opts.batch_size == 0 || opts.batch_size > MAX_BATCH {
        return Err(Error::config(format!("batch size must be in 1..={MAX_BATCH}")));
    }
    if world.edits().is_empty() {
        return Err(Error::config("nothing to export: the edit log is empty"));
    }
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(opts.timeout))
        .build()
        .into();
    let base = base_url(endpoint);
    let mut report = ExportReport::default();

    report.requests += 1;
    let text = agent
        .get(&format!("{base}/buildarea"))
        .call()
        .and_then(|mut r| r.body_mut().read_to_string())
        .map_err(|e| Error::Network(format!("build area query failed: {e}")))?;
    let area: BuildArea =
        serde_json::from_str(&text).map_err(|e| Error::Network(format!("malformed build area: {e}")))?;
    if area.width() < world.width() || area.length() < world.length() {
        return Err(Error::DimensionMismatch {
            width: world.width(),
            length: world.length(),
            actual_width: area.width(),
            actual_length: area.length(),
        });
    }

    for batch in world.edits().chunks(opts.batch_size) {
        report.batches += 1;
        let body = batch.iter().map(|e| edit_line(e, &area)).collect::<Vec<_>>().join("\n");
        let mut attempt = 0;
        loop {
            report.requests += 1;
            let sent = agent
                .put(&format!("{base}/blocks"))
                .header("Content-Type", "text/plain")
                .send(body.as_str());
            match sent {
                Ok(_) => {
                    report.placed += batch.len();
                    break;
                }
                Err(e) if attempt < opts.retries => {
                    log::warn!("batch {} failed ({e}), retrying", report.batches);
                    thread::sleep(opts.backoff * 2u32.pow(attempt));
                    attempt += 1;
                    report.retries += 1;
                }
                Err(e) => {
                    log::error!("batch {} dropped after {} attempts: {e}", report.batches, attempt + 1);
                    report.failed += batch.len();
                    break;
                }
            }
        }
    }
    Ok(report)
}
