//! Text formats: field, phase, profile and table CSV files with a `#`
//! metadata line, TOML configs and JSON summaries. Every writer goes through
//! [`write_atomic`].

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::boundary::BoundaryPhase;
use crate::error::{Error, Result};
use crate::field::{Layout, PolarField};
use crate::radial::RadialProfile;
use crate::symmetry::{equivariance_residual, Sign, SymmetryClass};
use crate::Vec2;

/// Write to a temporary file next to `path`, then rename over it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// `# k=v,k=v` → map.
fn parse_meta(line: &str) -> Result<BTreeMap<String, String>> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| parse_err("missing '#' metadata line"))?;
    let mut out = BTreeMap::new();
    for part in body.trim().split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| parse_err(format!("bad metadata entry '{part}'")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn meta_get<T: std::str::FromStr>(meta: &BTreeMap<String, String>, key: &str) -> Result<T> {
    meta.get(key)
        .ok_or_else(|| parse_err(format!("metadata lacks '{key}'")))?
        .parse()
        .map_err(|_| parse_err(format!("metadata '{key}' is malformed")))
}

fn split_meta(text: &str) -> Result<(BTreeMap<String, String>, &str)> {
    let (first, rest) = text.split_once('\n').ok_or_else(|| parse_err("empty file"))?;
    Ok((parse_meta(first)?, rest))
}

fn rows(body: &str) -> Result<Vec<csv::StringRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    rdr.records()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| parse_err(e.to_string()))
}

fn num<T: std::str::FromStr>(rec: &csv::StringRecord, k: usize) -> Result<T> {
    rec.get(k)
        .ok_or_else(|| parse_err("short row"))?
        .parse()
        .map_err(|_| parse_err(format!("bad number '{}'", rec.get(k).unwrap_or(""))))
}

fn to_csv(meta: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    writeln!(out, "# {meta}")?;
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(header).map_err(|e| parse_err(e.to_string()))?;
        for r in rows {
            w.write_record(&r).map_err(|e| parse_err(e.to_string()))?;
        }
        w.flush()?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldMeta {
    pub d: i64,
    pub sign: Sign,
    pub delta: f64,
    pub radius: f64,
    pub nr: usize,
    pub ntheta: usize,
    pub layout: String,
}

/// Field CSV: the origin once, then every ring with columns `0..=Nθ` so the
/// glued edge `θ = π/n` is explicit.
pub fn field_csv(field: &PolarField, d: i64, sign: Sign, delta: f64) -> Result<Vec<u8>> {
    let layout = match field.layout() {
        Layout::Disk => "disk",
        Layout::Sector(c) => {
            if c.d() != d || c.sign() != sign {
                return Err(Error::ClassMismatch("field layout and metadata disagree".into()));
            }
            "sector"
        }
    };
    let nt = field.ntheta();
    let meta = format!(
        "d={d},sign={sign},delta={delta},R={},Nr={},Ntheta={nt},layout={layout}",
        field.outer_radius(),
        field.nrings() - 1
    );
    let mut out = Vec::new();
    for i in 0..field.nrings() {
        let r = field.radii()[i];
        let cols: Vec<usize> = if i == 0 && field.has_origin() {
            vec![0]
        } else {
            (0..=nt).collect()
        };
        for j in cols {
            let u = field.get(i, j as i64);
            out.push(vec![
                i.to_string(),
                j.to_string(),
                r.to_string(),
                field.theta(j as i64).to_string(),
                u.re.to_string(),
                u.im.to_string(),
            ]);
        }
    }
    to_csv(&meta, &["i", "j", "r", "theta", "u1", "u2"], out)
}

pub fn write_field(path: &Path, field: &PolarField, d: i64, sign: Sign, delta: f64) -> Result<()> {
    write_atomic(path, &field_csv(field, d, sign, delta)?)
}

pub fn parse_field(text: &str) -> Result<(PolarField, FieldMeta)> {
    let (meta, body) = split_meta(text)?;
    let fm = FieldMeta {
        d: meta_get(&meta, "d")?,
        sign: meta_get(&meta, "sign")?,
        delta: meta_get(&meta, "delta")?,
        radius: meta_get(&meta, "R")?,
        nr: meta_get(&meta, "Nr")?,
        ntheta: meta_get(&meta, "Ntheta")?,
        layout: meta.get("layout").cloned().unwrap_or_else(|| "sector".into()),
    };
    let layout = match fm.layout.as_str() {
        "sector" => Layout::Sector(SymmetryClass::new(fm.d, fm.sign).map_err(|e| parse_err(e.to_string()))?),
        "disk" => Layout::Disk,
        other => return Err(parse_err(format!("unknown layout '{other}'"))),
    };
    let nt = fm.ntheta;
    let nrings = fm.nr + 1;
    let mut radii = vec![f64::NAN; nrings];
    let mut values = vec![Vec2::new(f64::NAN, f64::NAN); nrings * nt];
    let mut edge = vec![None; nrings];
    for rec in rows(body)? {
        let i: usize = num(&rec, 0)?;
        let j: usize = num(&rec, 1)?;
        if i >= nrings || j > nt {
            return Err(parse_err(format!("node ({i}, {j}) outside the grid")));
        }
        radii[i] = num(&rec, 2)?;
        let u = Vec2::new(num(&rec, 4)?, num(&rec, 5)?);
        if j == nt {
            edge[i] = Some(u);
        } else if i == 0 && radii[0] == 0.0 {
            values[..nt].iter_mut().for_each(|v| *v = u);
        } else {
            values[i * nt + j] = u;
        }
    }
    if radii.iter().any(|r| r.is_nan()) || values.iter().any(|v| v.re.is_nan()) {
        return Err(parse_err("field file is missing nodes"));
    }
    let field = PolarField::from_values(layout, radii, nt, values)?;
    if let Layout::Sector(class) = layout {
        let scale = field.max_abs().max(1.0);
        let tol = 1e-9 * scale;
        if field.has_origin() && field.node(0, 0).norm() > tol {
            return Err(parse_err("gluing violated: nonzero value at the origin"));
        }
        for (i, e) in edge.iter().enumerate() {
            let expect = field.get(i, nt as i64);
            if let Some(e) = e {
                if (e - expect).norm() > tol {
                    return Err(parse_err(format!("gluing violated on ring {i} at theta = pi/n")));
                }
            }
        }
        if equivariance_residual(class, &field)? > tol {
            return Err(parse_err("field is not equivariant for its class"));
        }
    }
    Ok((field, fm))
}

pub fn read_field(path: &Path) -> Result<(PolarField, FieldMeta)> {
    parse_field(&fs::read_to_string(path)?)
}

pub fn phase_csv(phase: &BoundaryPhase, delta: f64, c: f64) -> Result<Vec<u8>> {
    let alpha = phase.alpha();
    let meta = format!(
        "d={},sign={},delta={delta},M={},C={c}",
        phase.d(),
        phase.sign(),
        phase.len()
    );
    let rows = (0..phase.len()).map(|m| {
        let u = alpha * Vec2::from_polar(1.0, phase.psi()[m]);
        vec![
            phase.theta(m).to_string(),
            phase.psi()[m].to_string(),
            u.re.to_string(),
            u.im.to_string(),
        ]
    });
    to_csv(&meta, &["theta", "psi", "u1", "u2"], rows)
}

/// Returns the phase, `delta` and `C` from the metadata.
pub fn parse_phase(text: &str) -> Result<(BoundaryPhase, f64, f64)> {
    let (meta, body) = split_meta(text)?;
    let psi = rows(body)?
        .iter()
        .map(|r| num::<f64>(r, 1))
        .collect::<Result<Vec<_>>>()?;
    let m: usize = meta_get(&meta, "M")?;
    if psi.len() != m {
        return Err(parse_err(format!("expected {m} phase rows, found {}", psi.len())));
    }
    let phase = BoundaryPhase::new(meta_get(&meta, "d")?, meta_get(&meta, "sign")?, psi)?;
    Ok((phase, meta_get(&meta, "delta")?, meta_get(&meta, "C")?))
}

pub fn profile_csv(p: &RadialProfile) -> Result<Vec<u8>> {
    let meta = format!("d={},R_max={},N={},tol={}", p.d, p.r_max(), p.intervals(), p.tol);
    let rows = p
        .r_nodes
        .iter()
        .zip(&p.eta)
        .map(|(r, e)| vec![r.to_string(), e.to_string()]);
    to_csv(&meta, &["r", "eta"], rows)
}

pub fn parse_profile(text: &str) -> Result<RadialProfile> {
    let (meta, body) = split_meta(text)?;
    let recs = rows(body)?;
    let r_nodes = recs.iter().map(|r| num::<f64>(r, 0)).collect::<Result<Vec<_>>>()?;
    let eta = recs.iter().map(|r| num::<f64>(r, 1)).collect::<Result<Vec<f64>>>()?;
    let n: usize = meta_get(&meta, "N")?;
    if r_nodes.len() != n + 1 {
        return Err(parse_err("profile row count does not match N"));
    }
    let last = *eta.last().unwrap();
    let mut p = RadialProfile {
        d: meta_get(&meta, "d")?,
        boundary_defect: (1.0 - last).abs(),
        r_nodes,
        eta,
        residual: 0.0,
        tol: meta_get(&meta, "tol")?,
    };
    p.residual = p.ode_residual();
    Ok(p)
}

/// Plain table with a metadata line; cells are already formatted.
pub fn table_csv(meta: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>> {
    to_csv(meta, header, rows)
}

/// Header names and rows of a table written by [`table_csv`].
/// Metadata, header and rows of a table CSV.
pub type Table = (BTreeMap<String, String>, Vec<String>, Vec<Vec<String>>);

pub fn parse_table(text: &str) -> Result<Table> {
    let (meta, body) = split_meta(text)?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| parse_err(e.to_string()))?
        .iter()
        .map(String::from)
        .collect();
    let rows = rdr
        .records()
        .map(|r| r.map(|r| r.iter().map(String::from).collect()))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| parse_err(e.to_string()))?;
    Ok((meta, header, rows))
}

pub fn read_toml<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| parse_err(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| parse_err(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::minimize_circle;
    use crate::field::uniform_radii;
    use crate::radial::{radial_field, solve_radial_profile};

    #[test]
    fn field_round_trip() {
        let p = solve_radial_profile(-2, 40.0, 1024, 1e-10).unwrap();
        let class = SymmetryClass::new(-2, Sign::Minus).unwrap();
        let u = radial_field(&p, -2, Sign::Minus.alpha(), 1.0, Layout::Sector(class), uniform_radii(6.0, 12), 10)
            .unwrap();
        let text = field_csv(&u, -2, Sign::Minus, 0.05).unwrap();
        let (back, meta) = parse_field(std::str::from_utf8(&text).unwrap()).unwrap();
        assert_eq!(back, u);
        assert_eq!((meta.d, meta.sign, meta.delta, meta.nr, meta.ntheta), (-2, Sign::Minus, 0.05, 12, 10));
    }

    #[test]
    fn broken_gluing_is_rejected() {
        let class = SymmetryClass::new(-1, Sign::Plus).unwrap();
        let u = PolarField::sector(class, uniform_radii(5.0, 6), 8, |r, t| Vec2::from_polar(r.min(1.0), -t));
        let text = String::from_utf8(field_csv(&u, -1, Sign::Plus, 0.0).unwrap()).unwrap();
        // corrupt the glued edge of ring 3
        let bad: Vec<String> = text
            .lines()
            .map(|l| if l.starts_with("3,8,") { format!("{},9.0,9.0", l.rsplitn(3, ',').last().unwrap()) } else { l.to_string() })
            .collect();
        assert!(matches!(parse_field(&bad.join("\n")), Err(Error::Parse(_))));
        // an asymmetric interior value trips the equivariance check
        let bad: Vec<String> = text
            .lines()
            .map(|l| if l.starts_with("2,3,") { format!("{},0.5,0.1", l.rsplitn(3, ',').last().unwrap()) } else { l.to_string() })
            .collect();
        assert!(parse_field(&bad.join("\n")).is_err());
    }

    #[test]
    fn phase_and_profile_round_trip() {
        let sol = minimize_circle(-1, Sign::Plus, 0.1, 64, 1e-10).unwrap();
        let text = phase_csv(&sol.phase, 0.1, sol.c()).unwrap();
        let (back, delta, c) = parse_phase(std::str::from_utf8(&text).unwrap()).unwrap();
        assert_eq!(back, sol.phase);
        assert_eq!((delta, c), (0.1, sol.c()));

        let p = solve_radial_profile(-1, 20.0, 512, 1e-10).unwrap();
        let back = parse_profile(std::str::from_utf8(&profile_csv(&p).unwrap()).unwrap()).unwrap();
        assert_eq!(back.eta, p.eta);
        assert_eq!(back.r_nodes, p.r_nodes);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/out.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"two");
        assert_eq!(fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);
    }
}
