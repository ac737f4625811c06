//! Parsers for list-valued flags.

use std::str::FromStr;

use nmutp::sampling::SlotKind;

fn numbers<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, String> {
    s.split(',').map(|t| t.trim().parse::<T>().map_err(|_| format!("bad {what} `{}`", t.trim()))).collect()
}

/// `all`, `3`, `1,7,11`, `1-5` or mixtures such as `1-3,9`.
pub fn rows(s: &str) -> Result<Vec<usize>, String> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok((1..=11).collect());
    }
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (
                    a.trim().parse().map_err(|_| format!("bad row `{part}`"))?,
                    b.trim().parse().map_err(|_| format!("bad row `{part}`"))?,
                );
                if a > b {
                    return Err(format!("empty row range `{part}`"));
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| format!("bad row `{part}`"))?),
        }
    }
    if let Some(r) = out.iter().find(|r| !(1..=11).contains(*r)) {
        return Err(format!("row {r} outside 1..=11"));
    }
    Ok(out)
}

/// `2:6` (inclusive), `2,3,5` or `4`.
pub fn dims(s: &str) -> Result<Vec<usize>, String> {
    let ds = match s.split_once(':') {
        Some((a, b)) => {
            let a: usize = a.trim().parse().map_err(|_| format!("bad dimension range `{s}`"))?;
            let b: usize = b.trim().parse().map_err(|_| format!("bad dimension range `{s}`"))?;
            (a..=b).collect()
        }
        None => numbers(s, "dimension")?,
    };
    if ds.is_empty() {
        return Err(format!("no dimensions in `{s}`"));
    }
    if let Some(d) = ds.iter().find(|&&d| d < 2) {
        return Err(format!("dimension {d} < 2"));
    }
    Ok(ds)
}

pub fn target(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = numbers(s, "distance")?;
    v.try_into().map_err(|v: Vec<f64>| format!("target needs 4 distances, got {}", v.len()))
}

pub fn slots<const N: usize>(s: &str) -> Result<[SlotKind; N], String> {
    let v = s.split(',').map(|t| t.parse::<SlotKind>().map_err(|e| e.to_string())).collect::<Result<Vec<_>, _>>()?;
    v.try_into().map_err(|v: Vec<SlotKind>| format!("expected {N} slot classes, got {}", v.len()))
}
