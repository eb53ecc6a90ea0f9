//! Network checkpoints: a JSON manifest describing the architecture plus a
//! little-endian 64-bit float parameter blob. Round-trips are bit-exact.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::deeponet::DeepOnet;
use super::energy::EnergyNet;
use super::operator::{IoNorm, OperatorNet};

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("manifest parse error on {path}: {source}")]
    Manifest {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("parameter blob {path} holds {got} values, manifest says {expected}")]
    BlobLength {
        path: PathBuf,
        expected: usize,
        got: usize,
    },
    #[error("unknown checkpoint kind {0:?}")]
    UnknownKind(String),
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    kind: String,
    seed: u64,
    sensor_count: Option<usize>,
    coord_dim: Option<usize>,
    out_dim: Option<usize>,
    hidden: Vec<usize>,
    latent: Option<usize>,
    diff_order: Option<usize>,
    components: Option<usize>,
    norm: Option<IoNorm>,
    param_count: usize,
    param_blob: String,
}

/// Any trained network the pipeline stores or reloads.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyNet {
    Operator(OperatorNet),
    DeepOnet(DeepOnet),
    Energy(EnergyNet),
}

fn hidden_of(sizes: &[usize]) -> Vec<usize> {
    sizes[1..sizes.len() - 1].to_vec()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CheckpointError> {
    let io_err = |source| CheckpointError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err)?;
    }
    let mut f = fs::File::create(path).map_err(io_err)?;
    f.write_all(bytes).map_err(io_err)
}

fn params_to_bytes(params: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(params.len() * 8);
    for p in params {
        out.extend_from_slice(&p.to_le_bytes());
    }
    out
}

fn params_from_bytes(bytes: &[u8]) -> Vec<f64> {
    bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect()
}

/// Writes `<dir>/<name>.json` and `<dir>/<name>.params.bin`.
pub fn save_checkpoint(
    dir: &Path,
    name: &str,
    net: &AnyNet,
    seed: u64,
) -> Result<(), CheckpointError> {
    let blob_name = format!("{name}.params.bin");
    let (manifest, params): (Manifest, Vec<f64>) = match net {
        AnyNet::Operator(op) => (
            Manifest {
                kind: "operator".into(),
                seed,
                sensor_count: Some(op.sensor_count()),
                coord_dim: Some(op.coord_dim()),
                out_dim: Some(op.out_dim()),
                hidden: hidden_of(op.core().sizes()),
                latent: None,
                diff_order: None,
                components: None,
                norm: Some(op.norm().clone()),
                param_count: op.param_count(),
                param_blob: blob_name.clone(),
            },
            op.core().params().to_vec(),
        ),
        AnyNet::DeepOnet(net) => (
            Manifest {
                kind: "deeponet".into(),
                seed,
                sensor_count: Some(net.sensor_count()),
                coord_dim: Some(net.coord_dim()),
                out_dim: Some(net.out_dim()),
                hidden: hidden_of(net.branch().sizes()),
                latent: Some(net.latent()),
                diff_order: None,
                components: None,
                norm: Some(net.norm().clone()),
                param_count: net.param_count(),
                param_blob: blob_name.clone(),
            },
            net.params(),
        ),
        AnyNet::Energy(en) => (
            Manifest {
                kind: "energy".into(),
                seed,
                sensor_count: None,
                coord_dim: None,
                out_dim: None,
                hidden: hidden_of(en.core().sizes()),
                latent: None,
                diff_order: Some(en.diff_order()),
                components: Some(en.components()),
                norm: None,
                param_count: en.param_count(),
                param_blob: blob_name.clone(),
            },
            en.core().params().to_vec(),
        ),
    };

    let json_path = dir.join(format!("{name}.json"));
    let body = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    write_file(&json_path, &body)?;
    write_file(&dir.join(&blob_name), &params_to_bytes(&params))
}

/// Reads a checkpoint written by [`save_checkpoint`]; returns the network and
/// the recorded seed.
pub fn load_checkpoint(dir: &Path, name: &str) -> Result<(AnyNet, u64), CheckpointError> {
    let json_path = dir.join(format!("{name}.json"));
    let body = fs::read(&json_path).map_err(|source| CheckpointError::Io {
        path: json_path.clone(),
        source,
    })?;
    let manifest: Manifest =
        serde_json::from_slice(&body).map_err(|source| CheckpointError::Manifest {
            path: json_path.clone(),
            source,
        })?;

    let blob_path = dir.join(&manifest.param_blob);
    let bytes = fs::read(&blob_path).map_err(|source| CheckpointError::Io {
        path: blob_path.clone(),
        source,
    })?;
    let params = params_from_bytes(&bytes);
    if params.len() != manifest.param_count {
        return Err(CheckpointError::BlobLength {
            path: blob_path,
            expected: manifest.param_count,
            got: params.len(),
        });
    }

    let net = match manifest.kind.as_str() {
        "operator" => {
            let mut op = OperatorNet::new(
                manifest.sensor_count.unwrap_or(0),
                manifest.coord_dim.unwrap_or(0),
                &manifest.hidden,
                manifest.out_dim.unwrap_or(1),
            );
            if let Some(norm) = manifest.norm {
                op.set_norm(norm);
            }
            op.core_mut().set_params(&params);
            AnyNet::Operator(op)
        }
        "deeponet" => {
            let mut net = DeepOnet::new(
                manifest.sensor_count.unwrap_or(0),
                manifest.coord_dim.unwrap_or(0),
                &manifest.hidden,
                manifest.out_dim.unwrap_or(1),
                manifest.latent.unwrap_or(1),
            );
            if let Some(norm) = manifest.norm {
                net.set_norm(norm);
            }
            net.set_params(&params);
            AnyNet::DeepOnet(net)
        }
        "energy" => {
            let mut en = EnergyNet::new(
                manifest.components.unwrap_or(1),
                manifest.diff_order.unwrap_or(0),
                &manifest.hidden,
            );
            en.core_mut().set_params(&params);
            AnyNet::Energy(en)
        }
        other => return Err(CheckpointError::UnknownKind(other.to_string())),
    };
    Ok((net, manifest.seed))
}
