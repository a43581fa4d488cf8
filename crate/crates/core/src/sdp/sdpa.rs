//! SDPA sparse format (`.dat-s`).
//!
//! A [`StandardSdp`] is written in SDPA's dual form `max F0•Y s.t. Fi•Y = ci,
//! Y ⪰ 0` with `Y = blockdiag(G, diag(F⁺, F⁻, slacks))`: the free vector is
//! split into two nonnegative parts and every inequality gets one slack. A
//! comment header records that layout so [`read`] restores the original
//! variables; files from other sources are read with every diagonal-block
//! entry treated as a nonnegative free-vector component.

use std::fmt::Write as _;

use super::{Sense, SdpConstraint, StandardSdp, SymSparse};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const LAYOUT_TAG: &str = "* layout";
const NAME_TAG: &str = "* name";

pub fn write<T: Scalar>(sdp: &StandardSdp<T>) -> String {
    let n = sdp.psd_dim;
    let p = sdp.free_dim;
    let slack_rows: Vec<usize> = (0..sdp.constraints.len()).filter(|&j| sdp.constraints[j].sense == Sense::LessEq).collect();
    let diag = 2 * p + slack_rows.len();
    let mut out = String::new();
    let _ = writeln!(out, "{LAYOUT_TAG} psd={n} free={p} slack={}", slack_rows.len());
    for (j, c) in sdp.constraints.iter().enumerate() {
        let _ = writeln!(out, "{NAME_TAG} {} {}", j + 1, c.name);
    }
    let _ = writeln!(out, "{}", sdp.constraints.len());
    let nblocks = if diag > 0 { 2 } else { 1 };
    let _ = writeln!(out, "{nblocks}");
    if diag > 0 {
        let _ = writeln!(out, "{} -{}", n, diag);
    } else {
        let _ = writeln!(out, "{n}");
    }
    let rhs: Vec<String> = sdp.constraints.iter().map(|c| fmt(c.rhs)).collect();
    let _ = writeln!(out, "{}", rhs.join(" "));

    let emit = |out: &mut String, mat: usize, mats: &SymSparse<T>, vec: &[(usize, T)], slack: Option<usize>| {
        for &(i, j, v) in mats.entries() {
            let _ = writeln!(out, "{mat} 1 {} {} {}", i + 1, j + 1, fmt(v));
        }
        for &(k, v) in vec {
            let _ = writeln!(out, "{mat} 2 {} {} {}", k + 1, k + 1, fmt(v));
            let _ = writeln!(out, "{mat} 2 {} {} {}", p + k + 1, p + k + 1, fmt(-v));
        }
        if let Some(s) = slack {
            let idx = 2 * p + s + 1;
            let _ = writeln!(out, "{mat} 2 {idx} {idx} 1");
        }
    };
    emit(&mut out, 0, &sdp.objective_mat, &sdp.objective_vec, None);
    for (j, c) in sdp.constraints.iter().enumerate() {
        let slack = slack_rows.iter().position(|&r| r == j);
        emit(&mut out, j + 1, &c.mat, &c.vec, slack);
    }
    out
}

fn fmt<T: Scalar>(v: T) -> String {
    format!("{}", v.to_f64_lossy())
}

struct Layout {
    psd: usize,
    free: usize,
    slack: usize,
}

fn parse_layout(line: &str) -> Option<Layout> {
    let rest = line.strip_prefix(LAYOUT_TAG)?;
    let mut psd = None;
    let mut free = None;
    let mut slack = None;
    for kv in rest.split_whitespace() {
        let (k, v) = kv.split_once('=')?;
        let v: usize = v.parse().ok()?;
        match k {
            "psd" => psd = Some(v),
            "free" => free = Some(v),
            "slack" => slack = Some(v),
            _ => return None,
        }
    }
    Some(Layout { psd: psd?, free: free?, slack: slack? })
}

pub fn read<T: Scalar>(text: &str) -> Result<StandardSdp<T>> {
    let mut layout = None;
    let mut names: Vec<(usize, String)> = Vec::new();
    // (line number, token) pairs of the numeric body
    let mut tokens: Vec<(usize, String)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('*') || line.starts_with('"') {
            if let Some(l) = parse_layout(line) {
                layout = Some(l);
            } else if let Some(rest) = line.strip_prefix(NAME_TAG) {
                let rest = rest.trim_start();
                if let Some((idx, name)) = rest.split_once(' ') {
                    if let Ok(i) = idx.parse::<usize>() {
                        names.push((i, name.to_string()));
                    }
                }
            }
            continue;
        }
        let line = line.split(['=', '"']).next().unwrap_or("");
        for tok in line.split(|c: char| c.is_whitespace() || ",{}()".contains(c)) {
            if !tok.is_empty() {
                tokens.push((ln + 1, tok.to_string()));
            }
        }
    }
    let mut cursor = tokens.into_iter();
    let mut next = |what: &str| -> Result<(usize, String)> {
        cursor.next().ok_or_else(|| Error::Parse { line: 0, msg: format!("unexpected end of file, expected {what}") })
    };
    let int = |t: (usize, String), what: &str| -> Result<i64> {
        t.1.parse::<i64>().map_err(|_| Error::Parse { line: t.0, msg: format!("expected integer {what}, got '{}'", t.1) })
    };
    let real = |t: (usize, String)| -> Result<f64> {
        t.1.parse::<f64>().map_err(|_| Error::Parse { line: t.0, msg: format!("expected number, got '{}'", t.1) })
    };

    let m = int(next("mDIM")?, "mDIM")?;
    let nblocks = int(next("nBLOCK")?, "nBLOCK")?;
    if m < 0 || nblocks < 1 {
        return Err(Error::Parse { line: 0, msg: "mDIM must be >= 0 and nBLOCK >= 1".into() });
    }
    let mut blocks = Vec::new();
    for _ in 0..nblocks {
        blocks.push(int(next("block size")?, "block size")?);
    }
    let m = m as usize;
    let mut rhs = Vec::with_capacity(m);
    for _ in 0..m {
        rhs.push(T::c(real(next("c vector entry")?)?));
    }

    // Offsets of PSD blocks inside G and of diagonal blocks inside the
    // nonnegative vector.
    let mut psd_off = Vec::new();
    let mut diag_off = Vec::new();
    let (mut n, mut q) = (0usize, 0usize);
    for &b in &blocks {
        if b > 0 {
            psd_off.push(Some(n));
            diag_off.push(None);
            n += b as usize;
        } else if b < 0 {
            psd_off.push(None);
            diag_off.push(Some(q));
            q += (-b) as usize;
        } else {
            return Err(Error::Parse { line: 0, msg: "block size 0".into() });
        }
    }

    let mut mats: Vec<Vec<(usize, usize, T)>> = vec![Vec::new(); m + 1];
    let mut diags: Vec<Vec<(usize, T)>> = vec![Vec::new(); m + 1];
    while let Ok(first) = next("matrix number") {
        let line = first.0;
        let matno = int(first, "matrix number")?;
        let blk = int(next("block number")?, "block number")?;
        let i = int(next("row")?, "row")?;
        let j = int(next("column")?, "column")?;
        let v = T::c(real(next("value")?)?);
        if matno < 0 || matno as usize > m || blk < 1 || blk as usize > blocks.len() {
            return Err(Error::Parse { line, msg: "entry refers to unknown matrix or block".into() });
        }
        let bsize = blocks[blk as usize - 1].unsigned_abs() as i64;
        if i < 1 || j < 1 || i > bsize || j > bsize {
            return Err(Error::Parse { line, msg: format!("index ({i},{j}) outside block of size {bsize}") });
        }
        let (i, j) = ((i - 1) as usize, (j - 1) as usize);
        let bi = blk as usize - 1;
        if let Some(off) = psd_off[bi] {
            mats[matno as usize].push((off + i, off + j, v));
        } else {
            if i != j {
                return Err(Error::Parse { line, msg: "off-diagonal entry in a diagonal block".into() });
            }
            diags[matno as usize].push((diag_off[bi].unwrap() + i, v));
        }
    }

    let name_of = |j: usize| names.iter().find(|(i, _)| *i == j + 1).map(|(_, s)| s.clone()).unwrap_or_else(|| format!("c{}", j + 1));

    if let Some(l) = layout.filter(|l| l.psd == n && 2 * l.free + l.slack == q) {
        let p = l.free;
        let split = |d: &[(usize, T)]| -> (Vec<(usize, T)>, bool) {
            let mut vec: Vec<(usize, T)> = d.iter().filter(|&&(k, _)| k < p).copied().collect();
            vec.sort_by_key(|e| e.0);
            (vec, d.iter().any(|&(k, _)| k >= 2 * p))
        };
        let mut sdp = StandardSdp::new(n.max(1), p);
        sdp.objective_mat = SymSparse::from_entries(mats[0].iter().copied());
        sdp.objective_vec = split(&diags[0]).0;
        for j in 0..m {
            let (vec, has_slack) = split(&diags[j + 1]);
            sdp.push(SdpConstraint {
                name: name_of(j),
                mat: SymSparse::from_entries(mats[j + 1].iter().copied()),
                vec,
                sense: if has_slack { Sense::LessEq } else { Sense::Eq },
                rhs: rhs[j],
            });
        }
        return Ok(sdp);
    }

    // Generic file: diagonal entries are nonnegative variables w ≥ 0.
    let mut sdp = StandardSdp::new(n.max(1), q);
    sdp.objective_mat = SymSparse::from_entries(mats[0].iter().copied());
    sdp.objective_vec = diags[0].clone();
    for j in 0..m {
        let mut vec = diags[j + 1].clone();
        vec.sort_by_key(|e| e.0);
        sdp.push(SdpConstraint {
            name: name_of(j),
            mat: SymSparse::from_entries(mats[j + 1].iter().copied()),
            vec,
            sense: Sense::Eq,
            rhs: rhs[j],
        });
    }
    for k in 0..q {
        sdp.push(SdpConstraint {
            name: format!("nonneg{}", k + 1),
            mat: SymSparse::zero(),
            vec: vec![(k, -T::one())],
            sense: Sense::LessEq,
            rhs: T::zero(),
        });
    }
    Ok(sdp)
}
