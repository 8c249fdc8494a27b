//! Sectioned workspace file format (`.lira`): a ring, one Lie–Rinehart
//! algebra, and named cocycles, cochains, connections and idempotents, all
//! given as quoted expression strings.  Loading validates every entity and
//! fails atomically with a line-anchored message.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cochain::{is_cocycle, Cochain, Connection};
use crate::error::{LiraError, Result};
use crate::lie::LieRinehart;
use crate::parse::poly_parse;
use crate::pmatrix::PMatrix;
use crate::ring::{BaseRing, Derivation, Poly};

#[derive(Debug)]
pub struct Workspace {
    pub ring: Arc<BaseRing>,
    pub algebra: Arc<LieRinehart>,
    pub cocycles: BTreeMap<String, Cochain>,
    pub cochains: BTreeMap<String, Cochain>,
    pub connections: BTreeMap<String, Connection>,
    pub idempotents: BTreeMap<String, PMatrix>,
}

fn syn(line: usize, msg: impl Into<String>) -> LiraError {
    LiraError::Syntax {
        pos: line,
        msg: msg.into(),
    }
}

/// Value side of a `key = ...` line: a list of quoted strings or a
/// bracketed matrix of quoted strings.
#[derive(Debug)]
enum Value {
    List(Vec<String>),
    Matrix(Vec<Vec<String>>),
}

fn parse_value(line_no: usize, text: &str) -> Result<Value> {
    let t = text.trim();
    if t.starts_with('[') {
        parse_matrix(line_no, t).map(Value::Matrix)
    } else {
        parse_string_list(line_no, t).map(Value::List)
    }
}

fn parse_string_list(line_no: usize, t: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut rest = t.trim();
    loop {
        if rest.starts_with('"') {
            let Some(end) = rest[1..].find('"') else {
                return Err(syn(line_no, "unterminated string"));
            };
            out.push(rest[1..1 + end].to_string());
            rest = rest[2 + end..].trim_start();
        } else {
            // bare atom: identifiers and integers need no quotes
            let end = rest.find(',').unwrap_or(rest.len());
            let atom = rest[..end].trim();
            if atom.is_empty() || atom.contains(['"', '[', ']']) {
                return Err(syn(line_no, "expected a quoted expression or bare atom"));
            }
            out.push(atom.to_string());
            rest = rest[end..].trim_start();
        }
        if rest.is_empty() {
            return Ok(out);
        }
        let Some(stripped) = rest.strip_prefix(',') else {
            return Err(syn(line_no, "expected ',' between values"));
        };
        rest = stripped.trim_start();
    }
}

fn parse_matrix(line_no: usize, t: &str) -> Result<Vec<Vec<String>>> {
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.trim_end().strip_suffix(']'))
        .ok_or_else(|| syn(line_no, "matrix must be enclosed in [ ... ]"))?
        .trim();
    let mut rows = Vec::new();
    let mut rest = inner;
    loop {
        if !rest.starts_with('[') {
            return Err(syn(line_no, "matrix row must start with '['"));
        }
        let Some(end) = rest.find(']') else {
            return Err(syn(line_no, "unterminated matrix row"));
        };
        rows.push(parse_string_list(line_no, rest[1..end].trim())?);
        rest = rest[end + 1..].trim_start();
        if rest.is_empty() {
            break;
        }
        let Some(stripped) = rest.strip_prefix(',') else {
            return Err(syn(line_no, "expected ',' between matrix rows"));
        };
        rest = stripped.trim_start();
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(syn(line_no, "matrix rows have unequal lengths"));
    }
    Ok(rows)
}

/// Parses a basis label `eN` (1-based) into a 0-based index.
fn basis_index(line_no: usize, label: &str, rank: usize) -> Result<usize> {
    let n: usize = label
        .strip_prefix('e')
        .and_then(|s| s.parse().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| syn(line_no, format!("expected basis label eN, found `{label}`")))?;
    if n > rank {
        return Err(syn(
            line_no,
            format!("basis label {label} exceeds rank {rank}"),
        ));
    }
    Ok(n - 1)
}

fn expr(ring: &Arc<BaseRing>, line_no: usize, text: &str) -> Result<Poly> {
    poly_parse(ring, text).map_err(|e| syn(line_no, format!("in expression `{text}`: {e}")))
}

struct Section {
    line: usize,
    header: String,
    entries: Vec<(usize, String, Value)>,
}

fn split_sections(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let header = name
                .strip_suffix(']')
                .ok_or_else(|| syn(line_no, "unterminated section header"))?
                .trim()
                .to_string();
            if header.is_empty() {
                return Err(syn(line_no, "empty section header"));
            }
            sections.push(Section {
                line: line_no,
                header,
                entries: Vec::new(),
            });
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(syn(line_no, "expected `key = value`"));
        };
        let Some(section) = sections.last_mut() else {
            return Err(syn(line_no, "entry before any section header"));
        };
        section
            .entries
            .push((line_no, key.trim().to_string(), parse_value(line_no, value)?));
    }
    Ok(sections)
}

fn build_ring(section: &Section) -> Result<Arc<BaseRing>> {
    let mut vars: Vec<String> = Vec::new();
    let mut laurent_names: Vec<String> = Vec::new();
    let mut relation: Option<(usize, String)> = None;
    for (line_no, key, value) in &section.entries {
        match (key.as_str(), value) {
            ("vars", Value::List(v)) => vars = v.clone(),
            ("laurent", Value::List(v)) => laurent_names = v.clone(),
            ("relation", Value::List(v)) if v.len() == 1 => {
                relation = Some((*line_no, v[0].clone()))
            }
            _ => return Err(syn(*line_no, format!("unexpected ring key `{key}`"))),
        }
    }
    // `vars = x, y` style: unquoted identifiers are also accepted
    let laurent: Vec<bool> = vars
        .iter()
        .map(|v| laurent_names.iter().any(|l| l == v))
        .collect();
    for l in &laurent_names {
        if !vars.contains(l) {
            return Err(syn(
                section.line,
                format!("laurent name `{l}` is not a declared variable"),
            ));
        }
    }
    let ring = if vars.is_empty() {
        BaseRing::rationals()
    } else {
        BaseRing::new(vars, laurent).map_err(|e| syn(section.line, e.to_string()))?
    };
    match relation {
        None => Ok(ring),
        Some((line_no, text)) => {
            let g = expr(&ring, line_no, &text)?;
            ring.with_relation(&g)
                .map_err(|e| syn(line_no, e.to_string()))
        }
    }
}

fn build_algebra(ring: &Arc<BaseRing>, section: &Section) -> Result<Arc<LieRinehart>> {
    let mut rank: Option<usize> = None;
    for (line_no, key, value) in &section.entries {
        if key == "rank" {
            let Value::List(v) = value else {
                return Err(syn(*line_no, "rank must be a single value"));
            };
            if v.len() != 1 {
                return Err(syn(*line_no, "rank must be a single value"));
            }
            rank = Some(
                v[0].parse()
                    .map_err(|_| syn(*line_no, "rank must be a positive integer"))?,
            );
        }
    }
    let rank = rank.ok_or_else(|| syn(section.line, "liealgebra section needs `rank`"))?;
    let mut anchor: Vec<Option<Derivation>> = vec![None; rank];
    let mut structure: BTreeMap<(usize, usize), Vec<Poly>> = BTreeMap::new();
    for (line_no, key, value) in &section.entries {
        let parts: Vec<&str> = key.split('.').collect();
        match (parts.as_slice(), value) {
            (["rank"], _) => {}
            (["anchor", label], Value::List(v)) => {
                let i = basis_index(*line_no, label, rank)?;
                if v.len() != ring.nvars() {
                    return Err(syn(
                        *line_no,
                        format!(
                            "anchor needs {} coefficients, found {}",
                            ring.nvars(),
                            v.len()
                        ),
                    ));
                }
                let coeffs: Vec<Poly> = v
                    .iter()
                    .map(|s| expr(ring, *line_no, s))
                    .collect::<Result<_>>()?;
                anchor[i] = Some(
                    Derivation::new(ring, coeffs).map_err(|e| syn(*line_no, e.to_string()))?,
                );
            }
            (["bracket", li, lj], Value::List(v)) => {
                let i = basis_index(*line_no, li, rank)?;
                let j = basis_index(*line_no, lj, rank)?;
                if i >= j {
                    return Err(syn(
                        *line_no,
                        format!("bracket.{li}.{lj}: only i < j entries are allowed"),
                    ));
                }
                if v.len() != rank {
                    return Err(syn(
                        *line_no,
                        format!("bracket needs {rank} coordinates, found {}", v.len()),
                    ));
                }
                let coords: Vec<Poly> = v
                    .iter()
                    .map(|s| expr(ring, *line_no, s))
                    .collect::<Result<_>>()?;
                structure.insert((i, j), coords);
            }
            _ => return Err(syn(*line_no, format!("unexpected liealgebra key `{key}`"))),
        }
    }
    let anchor: Vec<Derivation> = anchor
        .into_iter()
        .map(|d| d.unwrap_or_else(|| Derivation::zero(ring)))
        .collect();
    let lr = LieRinehart::new(ring.clone(), rank, anchor, structure)
        .map_err(|e| syn(section.line, e.to_string()))?;
    let report = lr.validate();
    if !report.passed() {
        let reason = report
            .entries
            .iter()
            .find(|e| !e.passed)
            .map(|e| format!("{}: {}", e.check, e.detail))
            .unwrap_or_else(|| "validation failed".into());
        return Err(LiraError::Validation {
            entity: "liealgebra".into(),
            reason,
        });
    }
    Ok(Arc::new(lr))
}

fn build_cochain(lr: &Arc<LieRinehart>, section: &Section) -> Result<Cochain> {
    let mut keys: Vec<(usize, Vec<usize>, Poly)> = Vec::new();
    let mut degree: Option<usize> = None;
    for (line_no, key, value) in &section.entries {
        let parts: Vec<&str> = key.split('.').collect();
        let (prefix, labels) = parts
            .split_first()
            .ok_or_else(|| syn(*line_no, "empty key"))?;
        if *prefix != "f" {
            return Err(syn(
                *line_no,
                format!("cochain entries use keys f.eI[.eJ...], found `{key}`"),
            ));
        }
        let tuple: Vec<usize> = labels
            .iter()
            .map(|l| basis_index(*line_no, l, lr.rank))
            .collect::<Result<_>>()?;
        match degree {
            None => degree = Some(tuple.len()),
            Some(p) if p != tuple.len() => {
                return Err(syn(*line_no, "mixed cochain degrees in one section"));
            }
            _ => {}
        }
        if tuple.windows(2).any(|w| w[0] >= w[1]) {
            return Err(syn(
                *line_no,
                format!("`{key}`: indices must be strictly increasing"),
            ));
        }
        let Value::List(v) = value else {
            return Err(syn(*line_no, "cochain value must be a quoted expression"));
        };
        if v.len() != 1 {
            return Err(syn(*line_no, "cochain values are single expressions"));
        }
        keys.push((*line_no, tuple, expr(&lr.ring, *line_no, &v[0])?));
    }
    let degree = degree.ok_or_else(|| syn(section.line, "empty cochain section"))?;
    let mut c = Cochain::zero(lr, degree, 1);
    for (line_no, tuple, value) in keys {
        c.set(tuple, vec![value])
            .map_err(|e| syn(line_no, e.to_string()))?;
    }
    Ok(c)
}

fn build_matrix(ring: &Arc<BaseRing>, line_no: usize, rows: &[Vec<String>]) -> Result<PMatrix> {
    let polys: Vec<Vec<Poly>> = rows
        .iter()
        .map(|r| r.iter().map(|s| expr(ring, line_no, s)).collect())
        .collect::<Result<_>>()?;
    let _ = ring;
    PMatrix::from_rows(polys).map_err(|e| syn(line_no, e.to_string()))
}

fn build_connection(lr: &Arc<LieRinehart>, section: &Section) -> Result<Connection> {
    let mut gamma: Vec<Option<PMatrix>> = vec![None; lr.rank];
    let mut rank: Option<usize> = None;
    for (line_no, key, value) in &section.entries {
        let parts: Vec<&str> = key.split('.').collect();
        match (parts.as_slice(), value) {
            (["rank"], Value::List(v)) if v.len() == 1 => {
                rank = Some(
                    v[0].parse()
                        .map_err(|_| syn(*line_no, "rank must be a positive integer"))?,
                );
            }
            (["gamma", label], Value::Matrix(rows)) => {
                let i = basis_index(*line_no, label, lr.rank)?;
                gamma[i] = Some(build_matrix(&lr.ring, *line_no, rows)?);
            }
            _ => return Err(syn(*line_no, format!("unexpected connection key `{key}`"))),
        }
    }
    let r = rank
        .or_else(|| gamma.iter().flatten().next().map(|m| m.rows))
        .ok_or_else(|| syn(section.line, "connection needs `rank` or a gamma entry"))?;
    let gamma: Vec<PMatrix> = gamma
        .into_iter()
        .map(|m| m.unwrap_or_else(|| PMatrix::zero(&lr.ring, r, r)))
        .collect();
    for m in &gamma {
        if m.rows != r || m.cols != r {
            return Err(syn(section.line, format!("gamma matrices must be {r}x{r}")));
        }
    }
    Connection::new(lr.clone(), r, gamma)
}

pub fn load_workspace_str(text: &str) -> Result<Workspace> {
    let sections = split_sections(text)?;
    let ring_section = sections
        .iter()
        .find(|s| s.header == "ring")
        .ok_or_else(|| syn(1, "missing [ring] section"))?;
    let ring = build_ring(ring_section)?;
    let alg_section = sections
        .iter()
        .find(|s| s.header == "liealgebra")
        .ok_or_else(|| syn(1, "missing [liealgebra] section"))?;
    let algebra = build_algebra(&ring, alg_section)?;

    let mut ws = Workspace {
        ring,
        algebra,
        cocycles: BTreeMap::new(),
        cochains: BTreeMap::new(),
        connections: BTreeMap::new(),
        idempotents: BTreeMap::new(),
    };
    for section in &sections {
        if section.header == "ring" || section.header == "liealgebra" {
            continue;
        }
        let Some((kind, name)) = section.header.split_once('.') else {
            return Err(syn(
                section.line,
                format!("unknown section `[{}]`", section.header),
            ));
        };
        if name.is_empty() {
            return Err(syn(section.line, "section name must not be empty"));
        }
        let duplicate = match kind {
            "cocycle" => ws.cocycles.contains_key(name),
            "cochain" => ws.cochains.contains_key(name),
            "connection" => ws.connections.contains_key(name),
            "idempotent" => ws.idempotents.contains_key(name),
            _ => {
                return Err(syn(
                    section.line,
                    format!("unknown section kind `{kind}`"),
                ))
            }
        };
        if duplicate {
            return Err(syn(
                section.line,
                format!("duplicate {kind} name `{name}`"),
            ));
        }
        match kind {
            "cocycle" => {
                let c = build_cochain(&ws.algebra, section)?;
                if c.p != 2 {
                    return Err(syn(section.line, "cocycle sections must have degree 2"));
                }
                let (ok, witness) = is_cocycle(&ws.algebra, &c);
                if !ok {
                    let ((i, j, k), _) = witness.expect("witness accompanies failure");
                    return Err(LiraError::Validation {
                        entity: format!("cocycle {name}"),
                        reason: format!(
                            "d2 f is nonzero on (e{}, e{}, e{})",
                            i + 1,
                            j + 1,
                            k + 1
                        ),
                    });
                }
                ws.cocycles.insert(name.to_string(), c);
            }
            "cochain" => {
                let c = build_cochain(&ws.algebra, section)?;
                ws.cochains.insert(name.to_string(), c);
            }
            "connection" => {
                let c = build_connection(&ws.algebra, section)?;
                ws.connections.insert(name.to_string(), c);
            }
            "idempotent" => {
                let mut phi: Option<(usize, PMatrix)> = None;
                for (line_no, key, value) in &section.entries {
                    match (key.as_str(), value) {
                        ("phi", Value::Matrix(rows)) => {
                            phi = Some((*line_no, build_matrix(&ws.ring, *line_no, rows)?));
                        }
                        _ => {
                            return Err(syn(
                                *line_no,
                                format!("unexpected idempotent key `{key}`"),
                            ))
                        }
                    }
                }
                let (line_no, phi) =
                    phi.ok_or_else(|| syn(section.line, "idempotent section needs `phi`"))?;
                if phi.rows != phi.cols {
                    return Err(syn(line_no, "phi must be square"));
                }
                let sq = phi.mul(&phi)?;
                if sq != phi {
                    return Err(LiraError::Validation {
                        entity: format!("idempotent {name}"),
                        reason: "phi^2 differs from phi".into(),
                    });
                }
                ws.idempotents.insert(name.to_string(), phi);
            }
            _ => unreachable!(),
        }
    }
    Ok(ws)
}

pub fn load_workspace(path: &std::path::Path) -> Result<Workspace> {
    let text = std::fs::read_to_string(path)?;
    load_workspace_str(&text)
}
