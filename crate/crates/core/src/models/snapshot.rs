use std::io::{BufRead, BufReader, Read, Write};

use super::{LinearModel, MlpModel, Model, ScoreModel};
use crate::error::{Error, Result};

const MAGIC: &str = "cs-reject-model 1";

/// Writes a plain-text snapshot: header, shape line, then one parameter per line.
///
/// Parameters use Rust's shortest round-trip float formatting, so a reload is
/// bit-exact.
pub fn write_snapshot<W: Write>(model: &Model, mut out: W) -> Result<()> {
    writeln!(out, "{MAGIC}")?;
    match model {
        Model::Linear(m) => writeln!(out, "linear {} {}", m.input_dim(), m.output_dim())?,
        Model::Mlp(m) => writeln!(out, "mlp {} {} {}", m.input_dim(), m.hidden(), m.output_dim())?,
    }
    for p in model.params() {
        writeln!(out, "{p:?}")?;
    }
    Ok(())
}

pub fn read_snapshot<R: Read>(input: R) -> Result<Model> {
    let mut lines = BufReader::new(input).lines();
    let bad = |msg: &str| Error::InvalidArgument(format!("model snapshot: {msg}"));
    let header = lines.next().ok_or_else(|| bad("empty input"))??;
    if header.trim() != MAGIC {
        return Err(bad("unrecognised header"));
    }
    let shape = lines.next().ok_or_else(|| bad("missing shape line"))??;
    let fields: Vec<&str> = shape.split_whitespace().collect();
    let dims: Vec<usize> = fields
        .iter()
        .skip(1)
        .map(|s| s.parse::<usize>().map_err(|_| bad("bad dimension")))
        .collect::<Result<_>>()?;
    let mut params = Vec::new();
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        params.push(t.parse::<f64>().map_err(|_| bad("bad parameter value"))?);
    }
    match (fields.first().copied(), dims.as_slice()) {
        (Some("linear"), &[d, k]) => {
            check_len(params.len(), k * (d + 1))?;
            Ok(Model::Linear(LinearModel::from_flat(d, k, params)))
        }
        (Some("mlp"), &[d, h, k]) => {
            check_len(params.len(), MlpModel::param_count(d, h, k))?;
            Ok(Model::Mlp(MlpModel::from_flat(d, h, k, params)))
        }
        _ => Err(bad("unknown architecture")),
    }
}

fn check_len(got: usize, expected: usize) -> Result<()> {
    if got == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
