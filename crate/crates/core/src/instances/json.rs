use serde::{Deserialize, Serialize};

use super::{Constraint, CspInstance, Meta, XorInstance};
use crate::error::{Error, Result};

const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Xor(XorInstance),
    Csp(CspInstance),
}

#[derive(Serialize, Deserialize)]
struct ClauseRecord {
    vars: Vec<usize>,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum Body {
    Xor { n: usize, k: usize, clauses: Vec<ClauseRecord>, #[serde(default)] meta: Meta },
    Csp { n: usize, k: usize, truth_table: Vec<u8>, constraints: Vec<Constraint>, #[serde(default)] meta: Meta },
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    version: u32,
    #[serde(flatten)]
    body: Body,
}

/// Parses and validates an instance file.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let env: Envelope = serde_json::from_str(text)?;
    if env.version != FORMAT_VERSION {
        return Err(Error::Parse(format!("unsupported instance version {}", env.version)));
    }
    match env.body {
        Body::Xor { n, k, clauses, meta } => {
            let mut inst = XorInstance::new(n, k, clauses.into_iter().map(|c| (c.vars, c.weight)))?;
            inst.meta = meta;
            Ok(Instance::Xor(inst))
        }
        Body::Csp { n, k, truth_table, constraints, meta } => {
            let mut inst = CspInstance::new(n, truth_table, constraints)?;
            if inst.k() != k {
                return Err(Error::Parse(format!("k={k} but the truth table has arity {}", inst.k())));
            }
            inst.meta = meta;
            Ok(Instance::Csp(inst))
        }
    }
}

impl Instance {
    pub fn to_json(&self) -> String {
        let body = match self {
            Instance::Xor(x) => Body::Xor {
                n: x.n(),
                k: x.k(),
                clauses: x.clauses().map(|(v, w)| ClauseRecord { vars: v.to_vec(), weight: w }).collect(),
                meta: x.meta.clone(),
            },
            Instance::Csp(c) => Body::Csp {
                n: c.n(),
                k: c.k(),
                truth_table: c.truth_table().to_vec(),
                constraints: c.constraints().to_vec(),
                meta: c.meta.clone(),
            },
        };
        serde_json::to_string(&Envelope { version: FORMAT_VERSION, body }).expect("instance serializes")
    }

    pub fn n(&self) -> usize {
        match self {
            Instance::Xor(x) => x.n(),
            Instance::Csp(c) => c.n(),
        }
    }

    pub fn m(&self) -> usize {
        match self {
            Instance::Xor(x) => x.m(),
            Instance::Csp(c) => c.m(),
        }
    }
}
