//! Report documents and JSON helpers shared by the commands.

use collapse_core::codes::PseudoMorley;
use collapse_core::colored::SubsetHandle;
use collapse_core::PointId;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::format::param_json;

/// The domain verdict of a command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A check came out negative.
    Violation,
    /// A search ran out of budget before reaching a verdict.
    Undecided,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Violation => "violation",
            Status::Undecided => "undecided",
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Violation => 1,
            Status::Undecided => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub config: RunConfig,
    /// Input name, then its path and digest.
    pub inputs: Vec<(String, Value)>,
    pub result: Value,
}

impl Report {
    /// Keys in the fixed order `command, status, config_digest, config,
    /// inputs, result`.
    pub fn to_json(&self) -> Value {
        let inputs: Map<String, Value> = self.inputs.iter().cloned().collect();
        json!({
            "command": self.command,
            "status": self.status.name(),
            "config_digest": self.config.digest(),
            "config": self.config,
            "inputs": inputs,
            "result": self.result,
        })
    }
}

pub fn ids_json<'a>(ids: impl IntoIterator<Item = &'a PointId>) -> Value {
    Value::Array(
        ids.into_iter()
            .map(|id| Value::String(id.as_str().into()))
            .collect(),
    )
}

pub fn set_json(s: &SubsetHandle) -> Value {
    ids_json(s.ids())
}

pub fn tuples_json(seq: &[Vec<PointId>]) -> Value {
    Value::Array(seq.iter().map(ids_json).collect())
}

pub fn sequence_json(pm: &PseudoMorley) -> Value {
    json!({
        "template": pm.template,
        "parameter": param_json(&pm.parameter),
        "length": pm.len(),
        "tuples": tuples_json(&pm.sequence),
        "lower_bound": pm.lower_bound,
    })
}
