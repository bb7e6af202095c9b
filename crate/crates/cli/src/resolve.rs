//! Turns command-line selectors into validated domain objects.

use std::fs;
use std::path::Path;

use anyhow::Context;
use flashx_core::{
    builtin_hardware, builtin_workload, mlp_workloads, Error, GemmWorkload, HardwareConfig,
    StyleTag,
};
use serde::Serialize;

use crate::args::TargetArgs;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedWorkload {
    pub label: String,
    pub workload: GemmWorkload,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedHardware {
    pub label: String,
    pub config: HardwareConfig,
}

/// Resolves a workload selector: a built-in id (`I`..`VI`), an `M,N,K`
/// triple, or `mlp:BATCH` for the four layers of the MLP.
pub fn workloads(selector: &str) -> Result<Vec<NamedWorkload>, Error> {
    let sel = selector.trim();
    if let Some(batch) = sel.strip_prefix("mlp:") {
        let batch: u64 = batch
            .trim()
            .parse()
            .map_err(|_| Error::InvalidWorkload(format!("bad MLP batch `{batch}`")))?;
        return Ok(mlp_workloads(batch)?
            .into_iter()
            .enumerate()
            .map(|(i, w)| NamedWorkload {
                label: format!("mlp{batch}-fc{}", i + 1),
                workload: w,
            })
            .collect());
    }
    if sel.contains(',') {
        let dims: Vec<u64> = sel
            .split(',')
            .map(|v| v.trim().parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|_| Error::InvalidWorkload(format!("bad dimensions `{sel}`")))?;
        let [m, n, k] = dims[..] else {
            return Err(Error::InvalidWorkload(format!(
                "expected M,N,K but got `{sel}`"
            )));
        };
        return Ok(vec![NamedWorkload {
            label: format!("{m}x{n}x{k}"),
            workload: GemmWorkload::new(m, n, k)?,
        }]);
    }
    Ok(vec![NamedWorkload {
        label: sel.to_ascii_uppercase(),
        workload: builtin_workload(sel)?,
    }])
}

/// Exactly one workload; `mlp:` selectors are rejected.
pub fn single_workload(selector: &str) -> Result<NamedWorkload, Error> {
    let mut ws = workloads(selector)?;
    if ws.len() != 1 {
        return Err(Error::InvalidWorkload(format!(
            "`{selector}` names {} workloads, this command takes one",
            ws.len()
        )));
    }
    Ok(ws.remove(0))
}

pub fn hardware_file(path: &Path) -> anyhow::Result<NamedHardware> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config: HardwareConfig = serde_json::from_str(&text).map_err(|e| Error::Config {
        field: "config".into(),
        reason: format!("{}: {e}", path.display()),
    })?;
    Ok(NamedHardware {
        label: path.display().to_string(),
        config,
    })
}

pub fn hardware(t: &TargetArgs) -> anyhow::Result<NamedHardware> {
    match &t.config {
        Some(path) => hardware_file(path),
        None => Ok(NamedHardware {
            label: t.hw.to_ascii_lowercase(),
            config: builtin_hardware(&t.hw)?,
        }),
    }
}

pub fn style(name: &str) -> Result<StyleTag, Error> {
    name.parse()
}
