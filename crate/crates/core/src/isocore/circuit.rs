//! Layered monotone boolean circuits: the common input format of the
//! hardness-gadget generators. Layer 1 holds constant gates; every later
//! layer is uniformly AND or OR with exactly two inputs from the previous
//! layer; the last layer is a single output gate.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    Input,
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateDef {
    Const(bool),
    Binary(usize, usize),
}

#[derive(Debug, Clone)]
pub struct LayeredCircuit {
    /// `layers[i]` = (kind, gate ids); layer 0 is the input layer.
    pub layers: Vec<(LayerKind, Vec<usize>)>,
    /// Definitions indexed by gate id (dense).
    pub defs: Vec<GateDef>,
}

impl LayeredCircuit {
    pub fn new(layers: Vec<(LayerKind, Vec<usize>)>, defs: Vec<GateDef>) -> Result<LayeredCircuit> {
        if layers.is_empty() {
            return Err(Error::InvalidInput("a circuit needs at least one layer".into()));
        }
        if layers[0].0 != LayerKind::Input {
            return Err(Error::InvalidInput("the first layer must be the input layer".into()));
        }
        let mut seen = vec![false; defs.len()];
        let mut layer_of = vec![usize::MAX; defs.len()];
        for (i, (kind, gates)) in layers.iter().enumerate() {
            if gates.is_empty() {
                return Err(Error::InvalidInput(format!("layer {} is empty", i + 1)));
            }
            if i > 0 && *kind == LayerKind::Input {
                return Err(Error::InvalidInput("only the first layer can be an input layer".into()));
            }
            for &g in gates {
                if g >= defs.len() || seen[g] {
                    return Err(Error::InvalidInput(format!("bad or duplicate gate id {g}")));
                }
                seen[g] = true;
                layer_of[g] = i;
                match (defs[g], kind) {
                    (GateDef::Const(_), LayerKind::Input) => {}
                    (GateDef::Binary(a, b), LayerKind::And | LayerKind::Or) => {
                        if a >= defs.len() || b >= defs.len() || layer_of[a] != i - 1 || layer_of[b] != i - 1 {
                            return Err(Error::InvalidInput(format!(
                                "gate {g} must take both inputs from the previous layer"
                            )));
                        }
                    }
                    _ => {
                        return Err(Error::InvalidInput(format!("gate {g} does not match its layer kind")));
                    }
                }
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::InvalidInput("dangling gate definitions".into()));
        }
        if layers.last().unwrap().1.len() != 1 {
            return Err(Error::InvalidInput("the last layer must hold exactly one gate".into()));
        }
        Ok(LayeredCircuit { layers, defs })
    }

    pub fn output_gate(&self) -> usize {
        self.layers.last().unwrap().1[0]
    }

    /// Reference evaluator.
    pub fn evaluate(&self) -> bool {
        let mut val = vec![false; self.defs.len()];
        for (kind, gates) in &self.layers {
            for &g in gates {
                val[g] = match (self.defs[g], kind) {
                    (GateDef::Const(b), _) => b,
                    (GateDef::Binary(a, b), LayerKind::And) => val[a] && val[b],
                    (GateDef::Binary(a, b), LayerKind::Or) => val[a] || val[b],
                    _ => unreachable!("validated"),
                };
            }
        }
        val[self.output_gate()]
    }
}

/// Text format:
///
/// ```text
/// layer 1 input
/// gate 0 = true
/// gate 1 = false
/// layer 2 or
/// gate 2 = 0 1
/// ```
pub fn parse_circuit(text: &str) -> Result<LayeredCircuit> {
    let mut layers: Vec<(LayerKind, Vec<usize>)> = Vec::new();
    let mut defs: Vec<(usize, GateDef)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["layer", idx, kind] => {
                let want = layers.len() + 1;
                if idx.parse::<usize>().ok() != Some(want) {
                    return Err(Error::Parse(format!("line {no}: expected `layer {want} ...`")));
                }
                let kind = match *kind {
                    "input" => LayerKind::Input,
                    "and" => LayerKind::And,
                    "or" => LayerKind::Or,
                    other => return Err(Error::Parse(format!("line {no}: unknown layer kind `{other}`"))),
                };
                layers.push((kind, Vec::new()));
            }
            ["gate", id, "=", rest @ ..] => {
                let id: usize = id
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {no}: bad gate id")))?;
                let layer = layers
                    .last_mut()
                    .ok_or_else(|| Error::Parse(format!("line {no}: gate before any layer")))?;
                let def = match rest {
                    ["true"] => GateDef::Const(true),
                    ["false"] => GateDef::Const(false),
                    [a, b] => {
                        let a = a.parse().map_err(|_| Error::Parse(format!("line {no}: bad input id")))?;
                        let b = b.parse().map_err(|_| Error::Parse(format!("line {no}: bad input id")))?;
                        GateDef::Binary(a, b)
                    }
                    _ => return Err(Error::Parse(format!("line {no}: expected `true`, `false` or two inputs"))),
                };
                layer.1.push(id);
                defs.push((id, def));
            }
            _ => return Err(Error::Parse(format!("line {no}: expected `layer ...` or `gate ...`"))),
        }
    }
    let max_id = defs.iter().map(|&(id, _)| id).max().map(|m| m + 1).unwrap_or(0);
    let mut dense = vec![GateDef::Const(false); max_id];
    let mut present = vec![false; max_id];
    for (id, def) in defs {
        if present[id] {
            return Err(Error::Parse(format!("gate {id} defined twice")));
        }
        present[id] = true;
        dense[id] = def;
    }
    if !present.iter().all(|&p| p) {
        return Err(Error::Parse("gate ids must be dense".into()));
    }
    LayeredCircuit::new(layers, dense)
}

pub fn write_circuit(c: &LayeredCircuit) -> String {
    let mut out = String::new();
    for (i, (kind, gates)) in c.layers.iter().enumerate() {
        let k = match kind {
            LayerKind::Input => "input",
            LayerKind::And => "and",
            LayerKind::Or => "or",
        };
        out.push_str(&format!("layer {} {}\n", i + 1, k));
        for &g in gates {
            match c.defs[g] {
                GateDef::Const(b) => out.push_str(&format!("gate {g} = {b}\n")),
                GateDef::Binary(a, b) => out.push_str(&format!("gate {g} = {a} {b}\n")),
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_evaluate() {
        let text = "layer 1 input\ngate 0 = true\ngate 1 = false\nlayer 2 or\ngate 2 = 0 1\n";
        let c = parse_circuit(text).unwrap();
        assert!(c.evaluate());
        let c2 = parse_circuit(&write_circuit(&c)).unwrap();
        assert_eq!(c2.evaluate(), c.evaluate());
    }

    #[test]
    fn rejects_cross_layer_wiring() {
        let text = "layer 1 input\ngate 0 = true\nlayer 2 and\ngate 1 = 0 0\nlayer 3 or\ngate 2 = 0 1\n";
        assert!(parse_circuit(text).is_err());
    }
}
