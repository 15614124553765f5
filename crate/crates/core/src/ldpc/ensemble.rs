//! Multi-edge degree distributions.
//!
//! An ensemble lists variable-node and check-node classes; a class is a
//! multidegree vector (sockets per edge type) with a probability of
//! occurrence per variable node. Check probabilities sum to 1 − R since
//! there are 1 − R check nodes per variable node, and per edge type the
//! socket expectations of both sides must balance.

use crate::error::{Error, Result};
use crate::rng::fnv1a64;
use std::fmt::Write as _;

/// A node class: sockets per edge type plus its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeClass {
    pub multidegree: Vec<u32>,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiEdgeEnsemble {
    pub rate: f64,
    pub edge_types: usize,
    pub var_classes: Vec<NodeClass>,
    pub chk_classes: Vec<NodeClass>,
}

/// Socket-balance report produced by [`MultiEdgeEnsemble::validate`].
#[derive(Debug, Clone)]
pub struct BalanceReport {
    /// Per edge type: (variable-side socket expectation, check-side).
    pub socket_sums: Vec<(f64, f64)>,
    pub var_probability_sum: f64,
    pub chk_probability_sum: f64,
    pub failures: Vec<String>,
}

impl BalanceReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

const BALANCE_TOL: f64 = 1e-9;

impl MultiEdgeEnsemble {
    /// Check probability normalizations and per-type socket balance.
    pub fn validate(&self) -> BalanceReport {
        let mut failures = Vec::new();
        let var_probability_sum: f64 = self.var_classes.iter().map(|c| c.probability).sum();
        let chk_probability_sum: f64 = self.chk_classes.iter().map(|c| c.probability).sum();
        if (var_probability_sum - 1.0).abs() > BALANCE_TOL {
            failures.push(format!("variable probabilities sum to {var_probability_sum}, expected 1"));
        }
        if (chk_probability_sum - (1.0 - self.rate)).abs() > BALANCE_TOL {
            failures.push(format!(
                "check probabilities sum to {chk_probability_sum}, expected 1 - R = {}",
                1.0 - self.rate
            ));
        }
        for c in self.var_classes.iter().chain(&self.chk_classes) {
            if c.multidegree.len() != self.edge_types {
                failures.push(format!("class {:?} has wrong edge-type count", c.multidegree));
            }
            if c.probability < 0.0 {
                failures.push(format!("class {:?} has negative probability", c.multidegree));
            }
        }
        let mut socket_sums = Vec::with_capacity(self.edge_types);
        for t in 0..self.edge_types {
            let v: f64 = self
                .var_classes
                .iter()
                .map(|c| c.probability * c.multidegree.get(t).copied().unwrap_or(0) as f64)
                .sum();
            let c: f64 = self
                .chk_classes
                .iter()
                .map(|c| c.probability * c.multidegree.get(t).copied().unwrap_or(0) as f64)
                .sum();
            if (v - c).abs() > BALANCE_TOL {
                failures.push(format!("edge type {t} unbalanced: variable side {v}, check side {c}"));
            }
            socket_sums.push((v, c));
        }
        BalanceReport { socket_sums, var_probability_sum, chk_probability_sum, failures }
    }

    pub fn validated(self) -> Result<Self> {
        let report = self.validate();
        if report.is_ok() {
            Ok(self)
        } else {
            Err(Error::Validation(report.failures.join("; ")))
        }
    }

    /// Text format:
    /// ```text
    /// rate 0.02
    /// edge_types 3
    /// var 0.0225 2 57 0
    /// chk 0.010625 3 0 0
    /// ```
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "rate {}", self.rate).unwrap();
        writeln!(out, "edge_types {}", self.edge_types).unwrap();
        for c in &self.var_classes {
            write!(out, "var {}", c.probability).unwrap();
            for &d in &c.multidegree {
                write!(out, " {d}").unwrap();
            }
            out.push('\n');
        }
        for c in &self.chk_classes {
            write!(out, "chk {}", c.probability).unwrap();
            for &d in &c.multidegree {
                write!(out, " {d}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut rate = None;
        let mut edge_types = None;
        let mut var_classes = Vec::new();
        let mut chk_classes = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let tag = parts.next().unwrap();
            let err = |msg: &str| Error::Format(format!("line {}: {msg}", lineno + 1));
            match tag {
                "rate" => {
                    rate = Some(
                        parts
                            .next()
                            .ok_or_else(|| err("missing rate value"))?
                            .parse::<f64>()
                            .map_err(|_| err("bad rate value"))?,
                    );
                }
                "edge_types" => {
                    edge_types = Some(
                        parts
                            .next()
                            .ok_or_else(|| err("missing edge_types value"))?
                            .parse::<usize>()
                            .map_err(|_| err("bad edge_types value"))?,
                    );
                }
                "var" | "chk" => {
                    let probability = parts
                        .next()
                        .ok_or_else(|| err("missing probability"))?
                        .parse::<f64>()
                        .map_err(|_| err("bad probability"))?;
                    let multidegree = parts
                        .map(|p| p.parse::<u32>().map_err(|_| err("bad degree")))
                        .collect::<Result<Vec<_>>>()?;
                    let class = NodeClass { multidegree, probability };
                    if tag == "var" {
                        var_classes.push(class);
                    } else {
                        chk_classes.push(class);
                    }
                }
                _ => return Err(err(&format!("unknown tag {tag}"))),
            }
        }
        let rate = rate.ok_or_else(|| Error::Format("missing rate line".into()))?;
        let edge_types = edge_types.ok_or_else(|| Error::Format("missing edge_types line".into()))?;
        Ok(MultiEdgeEnsemble { rate, edge_types, var_classes, chk_classes })
    }

    /// Content hash of the canonical text serialization.
    pub fn content_hash(&self) -> u64 {
        fnv1a64(self.to_text().as_bytes())
    }
}

fn class(probability: f64, multidegree: &[u32]) -> NodeClass {
    NodeClass { multidegree: multidegree.to_vec(), probability }
}

/// The built-in, normative rate-0.02 multi-edge ensemble: three edge types,
/// a 0.96-fraction of degree-1 variable nodes on type 2, and heavy type-1
/// columns of 57 sockets.
pub fn rate_002() -> MultiEdgeEnsemble {
    MultiEdgeEnsemble {
        rate: 0.02,
        edge_types: 3,
        var_classes: vec![
            class(0.0225, &[2, 57, 0]),
            class(0.0175, &[3, 57, 0]),
            class(0.96, &[0, 0, 1]),
        ],
        chk_classes: vec![
            class(0.010625, &[3, 0, 0]),
            class(0.009375, &[7, 0, 0]),
            class(0.6, &[0, 2, 1]),
            class(0.36, &[0, 3, 1]),
        ],
    }
}

/// A plain regular (3,6) rate-1/2 code expressed as a single-edge-type
/// ensemble; used as the stand-in half-rate code for high-dimension scans.
pub fn rate_half_regular() -> MultiEdgeEnsemble {
    MultiEdgeEnsemble {
        rate: 0.5,
        edge_types: 1,
        var_classes: vec![class(1.0, &[3])],
        chk_classes: vec![class(0.5, &[6])],
    }
}

/// Look up a built-in ensemble by name.
pub fn builtin_ensemble(name: &str) -> Result<MultiEdgeEnsemble> {
    match name {
        "rate0.02" => Ok(rate_002()),
        "rate0.5-regular" => Ok(rate_half_regular()),
        _ => Err(Error::domain(format!(
            "unknown builtin ensemble '{name}' (available: rate0.02, rate0.5-regular)"
        ))),
    }
}
