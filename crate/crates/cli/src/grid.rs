//! Range and list arguments: `a:b:step` (inclusive), `a,b,c`, or a single value.

/// Largest number of points a range may expand to.
pub const MAX_POINTS: usize = 1_000_000;

pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty grid".into());
    }
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("range {s:?} must be start:stop:step"));
        }
        let start = parse_finite(parts[0])?;
        let stop = parse_finite(parts[1])?;
        let step = parse_finite(parts[2])?;
        if !(step > 0.0) {
            return Err(format!("step must be positive in {s:?}"));
        }
        if stop < start {
            return Err(format!("range {s:?} has stop below start"));
        }
        let span = (stop - start) / step;
        if !(span < MAX_POINTS as f64) {
            return Err(format!("range {s:?} expands to more than {MAX_POINTS} points"));
        }
        let count = (span + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| start + i as f64 * step).collect());
    }
    s.split(',').map(|p| parse_finite(p.trim())).collect()
}

/// [`parse_grid`] restricted to non-negative integers.
pub fn parse_index_grid(s: &str) -> Result<Vec<usize>, String> {
    parse_grid(s)?.into_iter().map(to_index).collect()
}

pub fn to_index(x: f64) -> Result<usize, String> {
    let r = x.round();
    if (x - r).abs() > 1e-9 || r < 0.0 || r > usize::MAX as f64 / 2.0 {
        return Err(format!("{x} is not a non-negative integer"));
    }
    Ok(r as usize)
}

fn parse_finite(p: &str) -> Result<f64, String> {
    let v: f64 = p.parse().map_err(|_| format!("{p:?} is not a number"))?;
    if !v.is_finite() {
        return Err(format!("{p:?} is not finite"));
    }
    Ok(v)
}
