//! Line-oriented Pfaffian file format.
//!
//! ```text
//! pfaffian v1
//! vars: X1, X2
//! nxi: 0
//! dim: 2
//! monomials: 1; dX2
//! box: X1 in [0.5, 2.5]
//! matrix X1:
//! (1,2) = X2/X1
//! (2,1) = -X1*X2
//! end
//! ```
//!
//! Unlisted matrix entries are zero, as is the whole matrix of a variable
//! with no block. Comments run from `#` to end of line.

use std::collections::BTreeMap;
use std::io::BufRead;

use crate::ratfun::{parse_expression, RatMatrix, VarSet};

use super::{PfaffianError, PfaffianSystem, Result, DEFAULT_BOX};

fn format_err(line: usize, reason: impl Into<String>) -> PfaffianError {
    PfaffianError::Format { line, reason: reason.into() }
}

/// Parse a derivative multi-index like `1`, `dX2`, or `dz1^2*dz2`.
pub fn parse_multi_index(text: &str, vars: &VarSet) -> std::result::Result<Vec<u32>, String> {
    let text = text.trim();
    let mut index = vec![0u32; vars.len()];
    if text == "1" {
        return Ok(index);
    }
    for factor in text.split('*') {
        let factor = factor.trim();
        let rest = factor
            .strip_prefix('d')
            .ok_or_else(|| format!("monomial factor `{factor}` must start with `d`"))?;
        let (name, power) = match rest.split_once('^') {
            Some((n, p)) => {
                let power: u32 = p
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad exponent in monomial factor `{factor}`"))?;
                (n.trim(), power)
            }
            None => (rest.trim(), 1),
        };
        let idx = vars
            .index_of(name)
            .ok_or_else(|| format!("monomial references unknown variable `{name}`"))?;
        index[idx] += power;
    }
    Ok(index)
}

/// Inverse of [`parse_multi_index`], factors in variable order.
pub fn format_multi_index(index: &[u32], vars: &VarSet) -> String {
    let mut parts = Vec::new();
    for (name, &e) in vars.names().iter().zip(index) {
        if e == 1 {
            parts.push(format!("d{name}"));
        } else if e > 1 {
            parts.push(format!("d{name}^{e}"));
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

pub(super) fn parse(reader: impl BufRead) -> Result<PfaffianSystem> {
    let mut lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let stripped = match line.find('#') {
            Some(p) => &line[..p],
            None => &line[..],
        };
        let trimmed = stripped.trim();
        if !trimmed.is_empty() {
            lines.push((i + 1, trimmed.to_string()));
        }
    }
    let mut it = lines.into_iter().peekable();

    let (ln, header) = it.next().ok_or_else(|| format_err(0, "empty file"))?;
    if header != "pfaffian v1" {
        return Err(format_err(ln, "expected header `pfaffian v1`"));
    }

    let mut vars: Option<VarSet> = None;
    let mut nxi: Option<usize> = None;
    let mut dim: Option<usize> = None;
    let mut monomials: Option<Vec<Vec<u32>>> = None;
    let mut boxes: BTreeMap<String, (f64, f64)> = BTreeMap::new();

    while let Some((_, line)) = it.peek() {
        if line.starts_with("matrix ") {
            break;
        }
        let (ln, line) = it.next().expect("peeked");
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| format_err(ln, "expected `key: value`"))?;
        let value = value.trim();
        match key.trim() {
            "vars" => {
                let names: Vec<String> =
                    value.split(',').map(|s| s.trim().to_string()).collect();
                if names.iter().any(|n| n.is_empty()) {
                    return Err(format_err(ln, "empty variable name"));
                }
                vars = Some(VarSet::new(&names));
            }
            "nxi" => {
                nxi = Some(value.parse().map_err(|_| format_err(ln, "bad nxi"))?);
            }
            "dim" => {
                let d: usize = value.parse().map_err(|_| format_err(ln, "bad dim"))?;
                if d == 0 {
                    return Err(format_err(ln, "dim must be positive"));
                }
                dim = Some(d);
            }
            "monomials" => {
                let v = vars
                    .as_ref()
                    .ok_or_else(|| format_err(ln, "monomials before vars"))?;
                let mut out = Vec::new();
                for part in value.split(';') {
                    out.push(parse_multi_index(part, v).map_err(|e| format_err(ln, e))?);
                }
                monomials = Some(out);
            }
            "box" => {
                let v = vars.as_ref().ok_or_else(|| format_err(ln, "box before vars"))?;
                let (name, range) = value
                    .split_once(" in ")
                    .ok_or_else(|| format_err(ln, "expected `box: <var> in [lo, hi]`"))?;
                let name = name.trim();
                if v.index_of(name).is_none() {
                    return Err(format_err(ln, format!("box references unknown variable `{name}`")));
                }
                let range = range.trim();
                let inner = range
                    .strip_prefix('[')
                    .and_then(|r| r.strip_suffix(']'))
                    .ok_or_else(|| format_err(ln, "expected `[lo, hi]`"))?;
                let (lo, hi) = inner
                    .split_once(',')
                    .ok_or_else(|| format_err(ln, "expected `[lo, hi]`"))?;
                let lo: f64 = lo.trim().parse().map_err(|_| format_err(ln, "bad lower bound"))?;
                let hi: f64 = hi.trim().parse().map_err(|_| format_err(ln, "bad upper bound"))?;
                if !(lo < hi) {
                    return Err(format_err(ln, "box bounds must satisfy lo < hi"));
                }
                boxes.insert(name.to_string(), (lo, hi));
            }
            other => return Err(format_err(ln, format!("unknown key `{other}`"))),
        }
    }

    let vars = vars.ok_or_else(|| format_err(0, "missing `vars`"))?;
    let nxi = nxi.ok_or_else(|| format_err(0, "missing `nxi`"))?;
    let dim = dim.ok_or_else(|| format_err(0, "missing `dim`"))?;
    let monomials = monomials.ok_or_else(|| format_err(0, "missing `monomials`"))?;
    if nxi > vars.len() {
        return Err(format_err(0, "nxi exceeds the number of variables"));
    }
    if monomials.len() != dim {
        return Err(format_err(
            0,
            format!("{} monomials declared, dim is {dim}", monomials.len()),
        ));
    }
    if !monomials[0].iter().all(|&e| e == 0) {
        return Err(format_err(0, "first monomial must be `1`"));
    }

    let mut matrices: BTreeMap<String, RatMatrix> = BTreeMap::new();
    while let Some((ln, line)) = it.next() {
        let name = line
            .strip_prefix("matrix ")
            .and_then(|s| s.strip_suffix(':'))
            .ok_or_else(|| format_err(ln, "expected `matrix <var>:`"))?
            .trim()
            .to_string();
        if vars.index_of(&name).is_none() {
            return Err(format_err(ln, format!("matrix for unknown variable `{name}`")));
        }
        if matrices.contains_key(&name) {
            return Err(format_err(ln, format!("matrix for `{name}` declared twice")));
        }
        let mut m = RatMatrix::zero(&vars, dim, dim);
        let mut filled = vec![false; dim * dim];
        let mut terminated = false;
        for (ln, line) in it.by_ref() {
            if line == "end" {
                terminated = true;
                break;
            }
            let (idx, expr) = line
                .split_once('=')
                .ok_or_else(|| format_err(ln, "expected `(r,c) = <expression>`"))?;
            let idx = idx.trim();
            let inner = idx
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| format_err(ln, "expected `(r,c)` index"))?;
            let (r, c) = inner
                .split_once(',')
                .ok_or_else(|| format_err(ln, "expected `(r,c)` index"))?;
            let r: usize = r.trim().parse().map_err(|_| format_err(ln, "bad row index"))?;
            let c: usize = c.trim().parse().map_err(|_| format_err(ln, "bad column index"))?;
            if r == 0 || c == 0 || r > dim || c > dim {
                return Err(PfaffianError::DimensionMismatch { line: ln, row: r, col: c, dim });
            }
            if filled[(r - 1) * dim + (c - 1)] {
                return Err(PfaffianError::DuplicateEntry { line: ln, var: name, row: r, col: c });
            }
            filled[(r - 1) * dim + (c - 1)] = true;
            let value = parse_expression(expr.trim(), &vars)
                .map_err(|e| format_err(ln, format!("bad expression: {e}")))?;
            m.set(r - 1, c - 1, value);
        }
        if !terminated {
            return Err(format_err(ln, format!("matrix block for `{name}` not closed by `end`")));
        }
        matrices.insert(name, m);
    }

    for name in vars.names() {
        matrices
            .entry(name.clone())
            .or_insert_with(|| RatMatrix::zero(&vars, dim, dim));
    }

    let boxes: Vec<(f64, f64)> = vars
        .names()
        .iter()
        .map(|n| boxes.get(n).copied().unwrap_or(DEFAULT_BOX))
        .collect();

    Ok(PfaffianSystem::from_parts(vars, nxi, dim, monomials, matrices, boxes))
}

pub(super) fn serialize(sys: &PfaffianSystem) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let vars = sys.vars();
    writeln!(out, "pfaffian v1").unwrap();
    writeln!(out, "vars: {}", vars.names().join(", ")).unwrap();
    writeln!(out, "nxi: {}", sys.num_transform_vars()).unwrap();
    writeln!(out, "dim: {}", sys.dim()).unwrap();
    let monos: Vec<String> = sys
        .monomials()
        .iter()
        .map(|m| format_multi_index(m, vars))
        .collect();
    writeln!(out, "monomials: {}", monos.join("; ")).unwrap();
    for (name, &(lo, hi)) in vars.names().iter().zip(sys.boxes()) {
        writeln!(out, "box: {name} in [{lo}, {hi}]").unwrap();
    }
    for name in vars.names() {
        let m = sys.matrix(name).expect("all variables have matrices");
        writeln!(out, "matrix {name}:").unwrap();
        for (r, c, e) in m.entries() {
            if !e.is_zero() {
                writeln!(out, "({},{}) = {}", r + 1, c + 1, e).unwrap();
            }
        }
        writeln!(out, "end").unwrap();
    }
    out
}
