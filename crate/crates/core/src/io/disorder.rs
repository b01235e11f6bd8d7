//! Disorder-field files.
//!
//! Plain text. `#` header lines of the form `# key = value` carry the
//! geometry, rates and seed; other `#` lines are ignored. Then a CSV table
//! with one record per bond (2D) or per plaquette (3D), signs in {+1, -1}:
//!
//! ```text
//! # dim = 2                     # dim = 3
//! # L = 8                       # L = 4
//! # p_tilde = 0.042             # Tmax = 9
//! # seed = 17                   # p = 0.03
//! bond,s_c,s_t                  # q = 0.03
//! 0,1,-1                        # seed = 17
//! ...                           kind,index,s_c,s_t
//!                               timelike,0,1,1
//!                               spatial,0,-1,1
//! ```
//!
//! 3D timelike records come first, indexed `t * 2L² + bond`; spatial records
//! follow, indexed `t * L² + plaquette`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::lattice::{Cubic3D, Torus2D};
use crate::noise::{Disorder3D, DisorderField2D};
use crate::{Error, Result};

pub fn write_disorder_2d(field: &DisorderField2D) -> String {
    let mut s = format!(
        "# dim = 2\n# L = {}\n# p_tilde = {}\n# seed = {}\nbond,s_c,s_t\n",
        field.lattice.size(),
        field.p_tilde,
        field.seed
    );
    for (b, (c, t)) in field.sc.iter().zip(&field.st).enumerate() {
        let _ = writeln!(s, "{b},{c},{t}");
    }
    s
}

pub fn write_disorder_3d(field: &Disorder3D) -> String {
    let lat = &field.lattice;
    let mut s = format!(
        "# dim = 3\n# L = {}\n# Tmax = {}\n# p = {}\n# q = {}\n# seed = {}\nkind,index,s_c,s_t\n",
        lat.size(),
        lat.tmax(),
        field.p,
        field.q,
        field.seed
    );
    for (i, (c, t)) in field.s_c.iter().zip(&field.s_t).enumerate() {
        let _ = writeln!(s, "timelike,{i},{c},{t}");
    }
    for (i, (c, t)) in field.r_c.iter().zip(&field.r_t).enumerate() {
        let _ = writeln!(s, "spatial,{i},{c},{t}");
    }
    s
}

struct Parsed {
    header: HashMap<String, String>,
    records: Vec<Vec<String>>,
}

fn parse(path: &Path, columns: &str) -> Result<Parsed> {
    let schema = |msg: String| Error::Schema { path: path.display().to_string(), msg };
    let text = fs::read_to_string(path)?;
    let mut header = HashMap::new();
    let mut lines = text.lines();
    let mut seen_columns = false;
    let mut records = Vec::new();
    for line in lines.by_ref() {
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                header.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        if line.trim() != columns {
            return Err(schema(format!("expected columns `{columns}`, found `{line}`")));
        }
        seen_columns = true;
        break;
    }
    if !seen_columns {
        return Err(schema("missing column line".into()));
    }
    for line in lines.filter(|l| !l.trim().is_empty()) {
        records.push(line.split(',').map(|f| f.trim().to_string()).collect());
    }
    Ok(Parsed { header, records })
}

impl Parsed {
    fn get<T: std::str::FromStr>(&self, path: &Path, key: &str) -> Result<T> {
        self.header.get(key).and_then(|v| v.parse().ok()).ok_or_else(|| Error::Schema {
            path: path.display().to_string(),
            msg: format!("header key `{key}` missing or malformed"),
        })
    }
}

fn sign(path: &Path, s: &str) -> Result<i8> {
    match s {
        "1" | "+1" => Ok(1),
        "-1" => Ok(-1),
        _ => Err(Error::Schema {
            path: path.display().to_string(),
            msg: format!("sign `{s}` not in {{+1, -1}}"),
        }),
    }
}

pub fn read_disorder_2d(path: &Path) -> Result<DisorderField2D> {
    let schema = |msg: String| Error::Schema { path: path.display().to_string(), msg };
    let parsed = parse(path, "bond,s_c,s_t")?;
    if parsed.get::<usize>(path, "dim")? != 2 {
        return Err(schema("not a 2D disorder file".into()));
    }
    let lattice = Torus2D::new(parsed.get(path, "L")?)?;
    let mut field = DisorderField2D::clean(lattice);
    field.p_tilde = parsed.get(path, "p_tilde")?;
    field.seed = parsed.get(path, "seed")?;
    if parsed.records.len() != lattice.n_bonds() {
        return Err(schema(format!(
            "{} records for {} bonds",
            parsed.records.len(),
            lattice.n_bonds()
        )));
    }
    for (i, rec) in parsed.records.iter().enumerate() {
        match rec.as_slice() {
            [b, c, t] if b.parse() == Ok(i) => {
                field.sc[i] = sign(path, c)?;
                field.st[i] = sign(path, t)?;
            }
            _ => return Err(schema(format!("bad record {i}: {}", rec.join(",")))),
        }
    }
    Ok(field)
}

pub fn read_disorder_3d(path: &Path) -> Result<Disorder3D> {
    let schema = |msg: String| Error::Schema { path: path.display().to_string(), msg };
    let parsed = parse(path, "kind,index,s_c,s_t")?;
    if parsed.get::<usize>(path, "dim")? != 3 {
        return Err(schema("not a 3D disorder file".into()));
    }
    let lattice = Cubic3D::new(parsed.get(path, "L")?, parsed.get(path, "Tmax")?)?;
    let mut field = Disorder3D::clean(lattice);
    field.p = parsed.get(path, "p")?;
    field.q = parsed.get(path, "q")?;
    field.seed = parsed.get(path, "seed")?;
    let ns = lattice.n_timelike_plaquettes();
    if parsed.records.len() != ns + lattice.n_spatial_plaquettes() {
        return Err(schema(format!("{} records, expected {}", parsed.records.len(), lattice.n_plaquettes())));
    }
    for (k, rec) in parsed.records.iter().enumerate() {
        let (kind, i) = if k < ns { ("timelike", k) } else { ("spatial", k - ns) };
        match rec.as_slice() {
            [kd, idx, c, t] if kd == kind && idx.parse() == Ok(i) => {
                let (c, t) = (sign(path, c)?, sign(path, t)?);
                if k < ns {
                    field.s_c[i] = c;
                    field.s_t[i] = t;
                } else {
                    field.r_c[i] = c;
                    field.r_t[i] = t;
                }
            }
            _ => return Err(schema(format!("bad record {k}: {}", rec.join(",")))),
        }
    }
    Ok(field)
}
