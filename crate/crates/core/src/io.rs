//! CSV/JSON serialization of fields and radial profiles.
//!
//! Field CSV layout (stable, `schema_version = 1`):
//!
//! ```text
//! # schema_version=1 config=<sha256 of the generating config, or "none">
//! # grid={"r_in":...,"r_out":...,"n_radial":...,"n_angular":...}
//! i_radial,i_angular,r,theta,value        (scalar fields)
//! i_radial,i_angular,r,theta,p,q          (1-forms, alpha = p dx + q dy)
//! ```
//!
//! Rows are emitted in node order (`i_radial` outer, `i_angular` inner) and
//! readers require exactly that order. Profile CSV uses the same comment
//! header with columns `r,w_mean,w_spread`, radii strictly decreasing.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{OneForm, ScalarField};
use crate::grid::AnnulusGrid;
use crate::singularity::RadialProfile;

/// Version of the on-disk layout documented above.
pub const SCHEMA_VERSION: u32 = 1;

/// Placeholder hash for data not produced from a config file.
pub const NO_CONFIG: &str = "none";

/// Hex SHA-256 of a canonical config serialization.
pub fn config_hash(canonical: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct GridHeader {
    r_in: f64,
    r_out: f64,
    n_radial: usize,
    n_angular: usize,
}

impl GridHeader {
    fn of(grid: AnnulusGrid) -> Self {
        Self {
            r_in: grid.r_in(),
            r_out: grid.r_out(),
            n_radial: grid.n_radial(),
            n_angular: grid.n_angular(),
        }
    }

    fn to_grid(self) -> Result<AnnulusGrid> {
        AnnulusGrid::new(self.r_in, self.r_out, self.n_radial, self.n_angular)
    }
}

fn write_header(
    out: &mut (impl Write + ?Sized),
    grid: Option<AnnulusGrid>,
    config: &str,
    columns: &str,
) -> Result<()> {
    writeln!(out, "# schema_version={SCHEMA_VERSION} config={config}")?;
    if let Some(grid) = grid {
        writeln!(out, "# grid={}", serde_json::to_string(&GridHeader::of(grid))?)?;
    }
    writeln!(out, "{columns}")?;
    Ok(())
}

/// Parsed comment header of a field/profile CSV.
#[derive(Debug, Clone)]
pub struct CsvHeader {
    pub schema_version: u32,
    pub config: String,
    pub grid: Option<AnnulusGrid>,
}

fn malformed(line: usize, message: impl Into<String>) -> Error {
    Error::MalformedCsv {
        line,
        message: message.into(),
    }
}

/// Read the comment header and the column row; returns the header and the
/// 1-based number of the first data line.
fn read_header(
    lines: &mut impl Iterator<Item = std::io::Result<String>>,
    expected_columns: &str,
) -> Result<(CsvHeader, usize)> {
    let mut lineno = 0usize;
    let mut schema_version = None;
    let mut config = None;
    let mut grid = None;
    loop {
        lineno += 1;
        let line = lines
            .next()
            .ok_or_else(|| malformed(lineno, "unexpected end of file in header"))??;
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(json) = rest.strip_prefix("grid=") {
                let header: GridHeader = serde_json::from_str(json)?;
                grid = Some(header.to_grid()?);
            } else {
                for token in rest.split_whitespace() {
                    if let Some(v) = token.strip_prefix("schema_version=") {
                        schema_version = Some(
                            v.parse::<u32>()
                                .map_err(|e| malformed(lineno, e.to_string()))?,
                        );
                    } else if let Some(v) = token.strip_prefix("config=") {
                        config = Some(v.to_string());
                    }
                }
            }
        } else {
            if line != expected_columns {
                return Err(malformed(
                    lineno,
                    format!("expected column row '{expected_columns}', got '{line}'"),
                ));
            }
            break;
        }
    }
    let schema_version =
        schema_version.ok_or_else(|| malformed(1, "missing schema_version in header"))?;
    if schema_version != SCHEMA_VERSION {
        return Err(malformed(
            1,
            format!("unsupported schema_version {schema_version} (expected {SCHEMA_VERSION})"),
        ));
    }
    Ok((
        CsvHeader {
            schema_version,
            config: config.unwrap_or_else(|| NO_CONFIG.to_string()),
            grid,
        },
        lineno + 1,
    ))
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| malformed(line, format!("'{s}': {e}")))
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|e| malformed(line, format!("'{s}': {e}")))
}

const SCALAR_COLUMNS: &str = "i_radial,i_angular,r,theta,value";
const ONE_FORM_COLUMNS: &str = "i_radial,i_angular,r,theta,p,q";
const PROFILE_COLUMNS: &str = "r,w_mean,w_spread";

/// Write a scalar field in the documented CSV layout.
pub fn write_scalar_csv(
    out: &mut (impl Write + ?Sized),
    field: &ScalarField,
    config: &str,
) -> Result<()> {
    let grid = *field.grid();
    write_header(out, Some(grid), config, SCALAR_COLUMNS)?;
    for (i, j) in grid.nodes() {
        writeln!(
            out,
            "{i},{j},{:.17e},{:.17e},{:.17e}",
            grid.r(i),
            grid.theta(j),
            field.at(i, j)
        )?;
    }
    Ok(())
}

/// Write a 1-form `p dx + q dy` in the documented CSV layout.
pub fn write_one_form_csv(
    out: &mut (impl Write + ?Sized),
    form: &OneForm,
    config: &str,
) -> Result<()> {
    let grid = *form.grid();
    write_header(out, Some(grid), config, ONE_FORM_COLUMNS)?;
    for (i, j) in grid.nodes() {
        writeln!(
            out,
            "{i},{j},{:.17e},{:.17e},{:.17e},{:.17e}",
            grid.r(i),
            grid.theta(j),
            form.p_at(i, j),
            form.q_at(i, j)
        )?;
    }
    Ok(())
}

/// Write a radial profile (`r,w_mean,w_spread`).
pub fn write_profile_csv(
    out: &mut (impl Write + ?Sized),
    profile: &RadialProfile,
    config: &str,
) -> Result<()> {
    write_header(out, None, config, PROFILE_COLUMNS)?;
    for (k, &r) in profile.radii.iter().enumerate() {
        writeln!(
            out,
            "{:.17e},{:.17e},{:.17e}",
            r, profile.w_values[k], profile.w_spread[k]
        )?;
    }
    Ok(())
}

fn read_field_rows(
    input: impl BufRead,
    expected_columns: &str,
    values_per_row: usize,
) -> Result<(CsvHeader, Vec<Vec<f64>>)> {
    let mut lines = input.lines();
    let (header, first_data_line) = read_header(&mut lines, expected_columns)?;
    let grid = header
        .grid
        .ok_or_else(|| malformed(1, "missing grid header"))?;
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(grid.len()); values_per_row];
    let mut expected = grid.nodes();
    let mut lineno = first_data_line - 1;
    for line in lines {
        lineno += 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 + values_per_row {
            return Err(malformed(
                lineno,
                format!("expected {} fields, got {}", 4 + values_per_row, parts.len()),
            ));
        }
        let (i, j) = (parse_usize(parts[0], lineno)?, parse_usize(parts[1], lineno)?);
        match expected.next() {
            Some((ei, ej)) if (ei, ej) == (i, j) => {}
            _ => {
                return Err(malformed(
                    lineno,
                    format!("node ({i},{j}) out of order or out of range"),
                ));
            }
        }
        for (k, col) in columns.iter_mut().enumerate() {
            col.push(parse_f64(parts[4 + k], lineno)?);
        }
    }
    if expected.next().is_some() {
        return Err(malformed(lineno + 1, "fewer data rows than grid nodes"));
    }
    Ok((header, columns))
}

/// Read a scalar field written by [`write_scalar_csv`].
pub fn read_scalar_csv(input: impl BufRead) -> Result<(ScalarField, CsvHeader)> {
    let (header, mut cols) = read_field_rows(input, SCALAR_COLUMNS, 1)?;
    let grid = header.grid.expect("checked in read_field_rows");
    Ok((ScalarField::new(grid, cols.pop().unwrap())?, header))
}

/// Read a 1-form written by [`write_one_form_csv`].
pub fn read_one_form_csv(input: impl BufRead) -> Result<(OneForm, CsvHeader)> {
    let (header, mut cols) = read_field_rows(input, ONE_FORM_COLUMNS, 2)?;
    let grid = header.grid.expect("checked in read_field_rows");
    let q = cols.pop().unwrap();
    let p = cols.pop().unwrap();
    Ok((OneForm::new(grid, p, q)?, header))
}

/// Read a radial profile written by [`write_profile_csv`].
pub fn read_profile_csv(input: impl BufRead) -> Result<(RadialProfile, CsvHeader)> {
    let mut lines = input.lines();
    let (header, first_data_line) = read_header(&mut lines, PROFILE_COLUMNS)?;
    let mut radii = Vec::new();
    let mut w_values = Vec::new();
    let mut w_spread = Vec::new();
    let mut lineno = first_data_line - 1;
    for line in lines {
        lineno += 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(malformed(
                lineno,
                format!("expected 3 fields, got {}", parts.len()),
            ));
        }
        radii.push(parse_f64(parts[0], lineno)?);
        w_values.push(parse_f64(parts[1], lineno)?);
        w_spread.push(parse_f64(parts[2], lineno)?);
    }
    Ok((RadialProfile::new(radii, w_values, w_spread)?, header))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::singularity::dyadic_radii;
    use std::io::BufReader;

    fn roundtrip_bytes(write: impl FnOnce(&mut Vec<u8>)) -> Vec<u8> {
        let mut buf = Vec::new();
        write(&mut buf);
        buf
    }

    #[test]
    fn scalar_roundtrip_is_exact() {
        let g = AnnulusGrid::new(0.1, 0.9, 8, 8).unwrap();
        let f = ScalarField::from_fn(g, |x, y| x * x - y.exp());
        let hash = config_hash("{\"grid\":8}");
        let buf = roundtrip_bytes(|b| write_scalar_csv(b, &f, &hash).unwrap());
        let (back, header) = read_scalar_csv(BufReader::new(buf.as_slice())).unwrap();
        assert_eq!(header.schema_version, SCHEMA_VERSION);
        assert_eq!(header.config, hash);
        for (i, j) in g.nodes() {
            assert_eq!(back.at(i, j), f.at(i, j));
        }
    }

    #[test]
    fn one_form_roundtrip_is_exact() {
        let g = AnnulusGrid::new(0.1, 0.9, 8, 8).unwrap();
        let a = OneForm::from_fn(g, |x, y| (x + y, x * y));
        let buf = roundtrip_bytes(|b| write_one_form_csv(b, &a, NO_CONFIG).unwrap());
        let (back, _) = read_one_form_csv(BufReader::new(buf.as_slice())).unwrap();
        for (i, j) in g.nodes() {
            assert_eq!(back.p_at(i, j), a.p_at(i, j));
            assert_eq!(back.q_at(i, j), a.q_at(i, j));
        }
    }

    #[test]
    fn profile_roundtrip_is_exact() {
        let radii = dyadic_radii(0.25, 1e-3);
        let w: Vec<f64> = radii.iter().map(|&r| -r * r.ln()).collect();
        let spread = vec![1.0 + 1e-9; radii.len()];
        let p = RadialProfile::new(radii, w, spread).unwrap();
        let buf = roundtrip_bytes(|b| write_profile_csv(b, &p, NO_CONFIG).unwrap());
        let (back, _) = read_profile_csv(BufReader::new(buf.as_slice())).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn malformed_inputs_are_rejected_with_line_numbers() {
        let g = AnnulusGrid::new(0.1, 0.9, 8, 8).unwrap();
        let f = ScalarField::from_fn(g, |_, _| 1.0);
        let buf = roundtrip_bytes(|b| write_scalar_csv(b, &f, NO_CONFIG).unwrap());
        let text = String::from_utf8(buf).unwrap();

        // truncated file
        let truncated: String = text.lines().take(10).collect::<Vec<_>>().join("\n");
        assert!(matches!(
            read_scalar_csv(BufReader::new(truncated.as_bytes())),
            Err(Error::MalformedCsv { .. })
        ));

        // corrupted value
        let corrupt = text.replacen("1.00000000000000000e0", "not-a-number", 1);
        match read_scalar_csv(BufReader::new(corrupt.as_bytes())) {
            Err(Error::MalformedCsv { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }

        // wrong schema version
        let wrong = text.replacen("schema_version=1", "schema_version=99", 1);
        assert!(matches!(
            read_scalar_csv(BufReader::new(wrong.as_bytes())),
            Err(Error::MalformedCsv { .. })
        ));

        // shuffled node order
        let mut lines: Vec<&str> = text.lines().collect();
        lines.swap(3, 4);
        let shuffled = lines.join("\n");
        assert!(matches!(
            read_scalar_csv(BufReader::new(shuffled.as_bytes())),
            Err(Error::MalformedCsv { .. })
        ));
    }

    #[test]
    fn config_hash_is_stable_hex() {
        let h = config_hash("abc");
        assert_eq!(h.len(), 64);
        assert_eq!(
            h,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_ne!(config_hash("abcd"), h);
    }
}
