//! Trained-model checkpoints: the magic line `EEXCKPT1` followed by one JSON
//! document listing named parameter tensors with shapes. Values are written
//! as shortest round-trip decimals, so a load reproduces every f64 bit for
//! bit.
//!
//! A checkpoint carries the encoder tensors (in the encoder's declared
//! order) plus the trained heads as `entailment_w` `[dim, 3]`,
//! `span_w_start` `[dim, 1]`, and `span_w_end` `[dim, 1]`.

use std::path::Path;

use eex_core::encoding::Encoder;
use eex_core::heads::{EntailmentParams, SpanParams};
use eex_core::training::TrainedHeads;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CHECKPOINT_MAGIC: &str = "EEXCKPT1";

pub const ENTAILMENT_TENSOR: &str = "entailment_w";
pub const SPAN_START_TENSOR: &str = "span_w_start";
pub const SPAN_END_TENSOR: &str = "span_w_end";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    pub name: String,
    pub shape: [usize; 2],
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    /// Encoder family the tensors belong to ("tiny" or "mock").
    pub encoder: String,
    /// Seed the encoder was constructed from (recreates fixed encoders).
    pub encoder_seed: u64,
    pub vocab_size: usize,
    pub dim: usize,
    pub tensors: Vec<Tensor>,
}

impl Checkpoint {
    /// Snapshot of a trained encoder and its heads.
    pub fn from_trained(
        encoder_kind: &str,
        encoder_seed: u64,
        vocab_size: usize,
        encoder: &dyn Encoder,
        heads: &TrainedHeads,
    ) -> Checkpoint {
        let dim = encoder.dim();
        let mut tensors = Vec::new();
        let params = encoder.params();
        let mut offset = 0;
        for spec in encoder.param_specs() {
            let len = spec.len();
            tensors.push(Tensor {
                name: spec.name.to_string(),
                shape: spec.shape,
                data: params[offset..offset + len].to_vec(),
            });
            offset += len;
        }
        tensors.push(Tensor {
            name: ENTAILMENT_TENSOR.to_string(),
            shape: [dim, 3],
            data: heads.entailment.w.clone(),
        });
        tensors.push(Tensor {
            name: SPAN_START_TENSOR.to_string(),
            shape: [dim, 1],
            data: heads.span.w_start.clone(),
        });
        tensors.push(Tensor {
            name: SPAN_END_TENSOR.to_string(),
            shape: [dim, 1],
            data: heads.span.w_end.clone(),
        });
        Checkpoint {
            encoder: encoder_kind.to_string(),
            encoder_seed,
            vocab_size,
            dim,
            tensors,
        }
    }

    pub fn tensor(&self, name: &str) -> Option<&Tensor> {
        self.tensors.iter().find(|t| t.name == name)
    }

    /// Concatenated encoder parameters, validated against the given specs.
    pub fn encoder_params(
        &self,
        path: &Path,
        specs: &[eex_core::encoding::ParamSpec],
    ) -> Result<Vec<f64>> {
        let mut flat = Vec::new();
        for spec in specs {
            let tensor = self.tensor(spec.name).ok_or_else(|| {
                Error::format(path, format!("checkpoint is missing tensor {:?}", spec.name))
            })?;
            if tensor.shape != spec.shape {
                return Err(Error::format(
                    path,
                    format!(
                        "tensor {:?} has shape {:?}, expected {:?}",
                        spec.name, tensor.shape, spec.shape
                    ),
                ));
            }
            if tensor.data.len() != spec.len() {
                return Err(Error::format(
                    path,
                    format!("tensor {:?} holds {} values for shape {:?}", spec.name, tensor.data.len(), tensor.shape),
                ));
            }
            flat.extend_from_slice(&tensor.data);
        }
        Ok(flat)
    }

    /// Rebuilds the trained heads stored alongside the encoder tensors.
    pub fn heads(&self, path: &Path, epoch_losses: Vec<f64>) -> Result<TrainedHeads> {
        let pull = |name: &str, cols: usize| -> Result<Vec<f64>> {
            let tensor = self
                .tensor(name)
                .ok_or_else(|| Error::format(path, format!("checkpoint is missing tensor {name:?}")))?;
            if tensor.shape != [self.dim, cols] || tensor.data.len() != self.dim * cols {
                return Err(Error::format(
                    path,
                    format!("tensor {name:?} does not match a [{}, {cols}] head", self.dim),
                ));
            }
            Ok(tensor.data.clone())
        };
        Ok(TrainedHeads {
            entailment: EntailmentParams { w: pull(ENTAILMENT_TENSOR, 3)?, dim: self.dim },
            span: SpanParams {
                w_start: pull(SPAN_START_TENSOR, 1)?,
                w_end: pull(SPAN_END_TENSOR, 1)?,
                dim: self.dim,
            },
            epoch_losses,
        })
    }
}

/// Writes the magic line and the checkpoint document.
pub fn save_checkpoint(path: &Path, checkpoint: &Checkpoint) -> Result<()> {
    let body = serde_json::to_string_pretty(checkpoint)
        .map_err(|e| Error::Json { path: path.into(), line: None, source: e })?;
    let text = format!("{CHECKPOINT_MAGIC}\n{body}\n");
    std::fs::write(path, text).map_err(|e| Error::write(path, e))
}

/// Reads a checkpoint, rejecting files without the magic header.
pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
    let body = text
        .strip_prefix(CHECKPOINT_MAGIC)
        .and_then(|rest| rest.strip_prefix('\n'))
        .ok_or_else(|| Error::format(path, format!("missing {CHECKPOINT_MAGIC} header")))?;
    let checkpoint: Checkpoint = serde_json::from_str(body)
        .map_err(|e| Error::Json { path: path.into(), line: None, source: e })?;
    for tensor in &checkpoint.tensors {
        if tensor.data.len() != tensor.shape[0] * tensor.shape[1] {
            return Err(Error::format(
                path,
                format!(
                    "tensor {:?} holds {} values for shape {:?}",
                    tensor.name,
                    tensor.data.len(),
                    tensor.shape
                ),
            ));
        }
    }
    Ok(checkpoint)
}
