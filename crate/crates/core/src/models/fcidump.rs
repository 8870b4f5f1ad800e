//! FCIDUMP reader and writer.
//!
//! The accepted format: a namelist header starting with `&FCI` carrying
//! `NORB=`, `NELEC=`, `MS2=` (and optionally `ORBSYM=`, `ISYM=`), terminated
//! by `&END` or `/`; then body lines `value i j k l` with 1-based indices.
//! `x i j 0 0` is a one-electron integral, `x 0 0 0 0` the core energy,
//! anything else a two-electron integral `(ij|kl)` in chemists' notation.
//! Parsing is whitespace- and comma-tolerant and body-order independent.

use std::io::BufRead;

use crate::error::{CoreError, Result};

use super::IntegralSet;

/// Parse an FCIDUMP stream into an [`IntegralSet`].
pub fn parse_fcidump<R: BufRead>(reader: R) -> Result<IntegralSet> {
    let mut lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CoreError::Parse {
            line: i + 1,
            message: format!("read failure: {e}"),
        })?;
        lines.push(line);
    }
    parse_lines(&lines)
}

/// Parse FCIDUMP text.
pub fn parse_fcidump_str(text: &str) -> Result<IntegralSet> {
    let lines: Vec<String> = text.lines().map(|s| s.to_string()).collect();
    parse_lines(&lines)
}

fn parse_lines(lines: &[String]) -> Result<IntegralSet> {
    let mut header = String::new();
    let mut body_start = 0usize;
    let mut in_header = false;
    let mut header_done = false;

    for (i, raw) in lines.iter().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if !in_header {
            if !line.to_ascii_uppercase().starts_with("&FCI") {
                return Err(CoreError::Parse {
                    line: i + 1,
                    message: "expected header starting with &FCI".into(),
                });
            }
            in_header = true;
            header.push_str(&line[4..]);
            header.push(' ');
        } else {
            header.push_str(line);
            header.push(' ');
        }
        let upper = header.to_ascii_uppercase();
        if let Some(pos) = upper.find("&END").or_else(|| upper.find('/')) {
            header.truncate(pos);
            body_start = i + 1;
            header_done = true;
            break;
        }
    }
    if !header_done {
        return Err(CoreError::Parse {
            line: lines.len(),
            message: "header not terminated by &END or /".into(),
        });
    }

    let fields = parse_namelist(&header)?;
    let norb = fields
        .get("NORB")
        .and_then(|v| v.first())
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| CoreError::Parse {
            line: 1,
            message: "missing or invalid NORB".into(),
        })?;
    let nelec = fields
        .get("NELEC")
        .and_then(|v| v.first())
        .and_then(|s| s.parse::<u32>().ok())
        .ok_or_else(|| CoreError::Parse {
            line: 1,
            message: "missing or invalid NELEC".into(),
        })?;
    let ms2 = fields
        .get("MS2")
        .and_then(|v| v.first())
        .map(|s| s.parse::<i32>())
        .transpose()
        .map_err(|_| CoreError::Parse {
            line: 1,
            message: "invalid MS2".into(),
        })?
        .unwrap_or(0);
    let orbsym: Vec<u32> = fields
        .get("ORBSYM")
        .map(|v| {
            v.iter()
                .map(|s| {
                    s.parse::<u32>().map_err(|_| CoreError::Parse {
                        line: 1,
                        message: format!("invalid ORBSYM entry '{s}'"),
                    })
                })
                .collect::<Result<Vec<u32>>>()
        })
        .transpose()?
        .unwrap_or_default();

    let mut ints = IntegralSet::zero(norb, nelec, ms2);
    ints.set_orbsym(orbsym);

    for (i, raw) in lines.iter().enumerate().skip(body_start) {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 5 {
            return Err(CoreError::Parse {
                line: lineno,
                message: format!("expected 'value i j k l', found {} tokens", tokens.len()),
            });
        }
        let value: f64 = parse_fortran_float(tokens[0]).ok_or_else(|| CoreError::Parse {
            line: lineno,
            message: format!("non-numeric value '{}'", tokens[0]),
        })?;
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&tokens[1..]) {
            *slot = tok.parse::<usize>().map_err(|_| CoreError::Parse {
                line: lineno,
                message: format!("non-numeric index '{tok}'"),
            })?;
            if *slot > norb {
                return Err(CoreError::Parse {
                    line: lineno,
                    message: format!("index {} exceeds NORB={norb}", *slot),
                });
            }
        }
        match idx {
            [0, 0, 0, 0] => ints.set_core_energy(value),
            [i, j, 0, 0] if i > 0 && j > 0 => ints.set_t(i - 1, j - 1, value),
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                ints.set_v(i - 1, j - 1, k - 1, l - 1, value)
            }
            _ => {
                return Err(CoreError::Parse {
                    line: lineno,
                    message: format!("unsupported index pattern {idx:?}"),
                })
            }
        }
    }

    Ok(ints)
}

/// Split `KEY=v1,v2 KEY2=v3 ...` into a key -> values map.
fn parse_namelist(header: &str) -> Result<std::collections::HashMap<String, Vec<String>>> {
    let mut map: std::collections::HashMap<String, Vec<String>> = Default::default();
    let normalized = header.replace('=', " = ");
    let mut tokens = normalized
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .peekable();
    let mut current_key: Option<String> = None;
    while let Some(tok) = tokens.next() {
        if tokens.peek() == Some(&"=") {
            current_key = Some(tok.to_ascii_uppercase());
            tokens.next();
            map.entry(current_key.clone().unwrap()).or_default();
        } else if let Some(key) = &current_key {
            map.get_mut(key).unwrap().push(tok.to_string());
        } else {
            return Err(CoreError::Parse {
                line: 1,
                message: format!("unexpected token '{tok}' in header"),
            });
        }
    }
    Ok(map)
}

/// Accept both C-style and Fortran-style exponents (`1.0E-3`, `1.0D-3`).
fn parse_fortran_float(token: &str) -> Option<f64> {
    let normalized = token.replace(['D', 'd'], "E");
    normalized.parse::<f64>().ok()
}

/// Serialize an [`IntegralSet`] back to FCIDUMP text.
///
/// Values are printed with Rust's shortest round-trip float formatting, so a
/// parse -> write -> parse cycle is value-exact.
pub fn write_fcidump(ints: &IntegralSet) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "&FCI NORB={},NELEC={},MS2={},\n",
        ints.orbital_count(),
        ints.electron_count(),
        ints.ms2()
    ));
    if !ints.orbsym().is_empty() {
        let labels: Vec<String> = ints.orbsym().iter().map(|s| s.to_string()).collect();
        out.push_str(&format!("  ORBSYM={},\n", labels.join(",")));
    }
    out.push_str("&END\n");

    let mut two: Vec<(usize, usize, usize, usize, f64)> = ints
        .two_body_expanded()
        .into_iter()
        .filter(|&(p, q, r, s, _)| {
            // Emit one canonical image per integral.
            let left = (p.max(q), p.min(q));
            let right = (r.max(s), r.min(s));
            (p, q) == left && (r, s) == right && left >= right
        })
        .collect();
    two.sort_unstable_by_key(|&(p, q, r, s, _)| (p, q, r, s));
    for (p, q, r, s, v) in two {
        out.push_str(&format!("{} {} {} {} {}\n", v, p + 1, q + 1, r + 1, s + 1));
    }
    for i in 0..ints.orbital_count() {
        for j in 0..=i {
            let t = ints.t(i, j);
            if t != 0.0 {
                out.push_str(&format!("{} {} {} 0 0\n", t, i + 1, j + 1));
            }
        }
    }
    if ints.core_energy() != 0.0 {
        out.push_str(&format!("{} 0 0 0 0\n", ints.core_energy()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_fields_are_read() {
        let ints = parse_fcidump_str("&FCI NORB=2,NELEC=2,MS2=0\n&END\n").unwrap();
        assert_eq!(ints.orbital_count(), 2);
        assert_eq!(ints.electron_count(), 2);
        assert_eq!(ints.ms2(), 0);
    }

    #[test]
    fn slash_terminates_header_and_orbsym_is_kept() {
        let ints = parse_fcidump_str("&FCI NORB=2, NELEC=2, MS2=0, ORBSYM=1,1, ISYM=1\n /\n")
            .unwrap();
        assert_eq!(ints.orbsym(), &[1, 1]);
    }

    #[test]
    fn body_lines_route_to_t_v_and_core() {
        let text = "\
&FCI NORB=2,NELEC=2,MS2=0
&END
0.5 1 1 2 2
-1.25D0 1 2 0 0
0.75 0 0 0 0
";
        let ints = parse_fcidump_str(text).unwrap();
        assert_eq!(ints.v(0, 0, 1, 1), 0.5);
        assert_eq!(ints.v(1, 1, 0, 0), 0.5);
        assert_eq!(ints.t(0, 1), -1.25);
        assert_eq!(ints.t(1, 0), -1.25);
        assert_eq!(ints.core_energy(), 0.75);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "&FCI NORB=2,NELEC=2,MS2=0\n&END\n0.5 1 1 2 abc\n";
        match parse_fcidump_str(text) {
            Err(CoreError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }

        let text = "&FCI NORB=2,NELEC=2,MS2=0\n&END\n0.5 1 1 2 3\n";
        match parse_fcidump_str(text) {
            Err(CoreError::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("NORB"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn round_trip_is_value_exact() {
        let text = "\
&FCI NORB=3,NELEC=2,MS2=0,ORBSYM=1,1,1
&END
0.9573125 1 1 1 1
0.123456789012345e-3 2 1 2 1
-0.5 3 3 1 1
-1.0286743 1 1 0 0
0.33 2 1 0 0
1.25 0 0 0 0
";
        let first = parse_fcidump_str(text).unwrap();
        let emitted = write_fcidump(&first);
        let second = parse_fcidump_str(&emitted).unwrap();
        assert_eq!(first, second);
    }
}
