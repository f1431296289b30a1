//! CSV tables for every report type, plus the raw `chi` import.
//!
//! Floats are written in lower-case scientific notation with 12 significant
//! digits, so outputs are byte-stable across runs and platforms.

use std::io::{Read, Write};

use crate::bounds::BoundsReport;
use crate::clipping::ClippingReport;
use crate::error::{Error, Result};
use crate::radiation::RadiationDistribution;
use crate::remnant::{QGrid, RemnantReport};
use crate::spectrum::SectorSpectrum;

pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.11e}")
    }
}

pub fn format_count(x: Option<usize>) -> String {
    x.map_or_else(|| "unreached".into(), |v| v.to_string())
}

/// Header row plus string cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: CsvTable) {
        debug_assert_eq!(self.header, other.header);
        self.rows.extend(other.rows);
    }

    /// Writes `# `-prefixed preamble lines, then the table.
    pub fn write<W: Write>(&self, mut w: W, preamble: &[String]) -> Result<()> {
        for line in preamble {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn to_string_with(&self, preamble: &[String]) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf, preamble).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("table cells are UTF-8")
    }
}

pub fn spectrum_table(chi: &SectorSpectrum) -> CsvTable {
    let mut t = CsvTable::new(&["mu", "chi"]);
    for (mu, c) in chi.to_vec().into_iter().enumerate() {
        t.push(vec![mu.to_string(), format_number(c)]);
    }
    t
}

pub fn radiation_table(dist: &RadiationDistribution) -> CsvTable {
    let mut t = CsvTable::new(&["n", "p_n"]);
    for (n, &p) in dist.p().iter().enumerate() {
        t.push(vec![n.to_string(), format_number(p)]);
    }
    t
}

pub const BOUNDS_HEADER: [&str; 13] = [
    "N", "k", "kind", "L", "dL", "ell", "theta", "eta", "delta_inv_bound", "delta_tot_bound",
    "opt_epsilon", "w_opt", "log_d_min",
];

pub fn bounds_table(reports: &[BoundsReport]) -> CsvTable {
    let mut t = CsvTable::new(&BOUNDS_HEADER);
    for r in reports {
        t.push(vec![
            r.spec.n.to_string(),
            r.spec.k.to_string(),
            r.spec.kind.to_string(),
            format_number(r.spec.l),
            format_number(r.spec.delta_l),
            r.ell.to_string(),
            format_number(r.theta),
            format_number(r.eta),
            format_number(r.delta_inv_bound),
            format_number(r.delta_tot_bound),
            format_number(r.opt_epsilon),
            format_number(r.w_opt),
            format_number(r.log_d_min()),
        ]);
    }
    t
}

pub const CLIPPING_HEADER: [&str; 9] = [
    "lambda", "c", "ell_hat_exact", "ell0", "ell_fl", "ell_hat_closed", "C_ini",
    "omega_alpha_product", "L_fl",
];

pub fn clipping_table(reports: &[ClippingReport]) -> CsvTable {
    let mut t = CsvTable::new(&CLIPPING_HEADER);
    for r in reports {
        t.push(vec![
            format_number(r.lambda),
            format_number(r.c),
            format_count(r.ell_hat_exact),
            format_number(r.closed.ell0),
            format_number(r.closed.ell_fl),
            format_number(r.closed.ell_hat_closed),
            format_number(r.closed.c_ini),
            format_number(r.thermo.omega_alpha.unwrap_or(f64::NAN)),
            format_number(r.thermo.l_fl),
        ]);
    }
    t
}

pub const REMNANT_HEADER: [&str; 7] = [
    "ell", "eta_exact", "var_nu", "zeta", "bound_exact", "bound_small_ell", "bound_large_ell",
];

pub fn remnant_table(reports: &[RemnantReport]) -> CsvTable {
    let mut t = CsvTable::new(&REMNANT_HEADER);
    for r in reports {
        t.push(vec![
            r.ell.to_string(),
            format_number(r.eta_exact),
            format_number(r.var_nu),
            format_number(r.zeta),
            format_number(r.bound_exact_variance),
            format_number(r.bound_branch_small_ell),
            format_number(r.bound_branch_large_ell),
        ]);
    }
    t
}

pub fn qgrid_table(grid: &QGrid) -> CsvTable {
    let mut t = CsvTable::new(&["x", "z", "Q"]);
    for s in &grid.samples {
        t.push(vec![format_number(s.x), format_number(s.z), format_number(s.q)]);
    }
    t
}

/// Reads a `mu,chi` CSV (with `#` comments) into a normalized spectrum.
/// Every `mu` in `0..=N` must appear exactly once, in any order.
pub fn read_chi_csv<R: Read>(reader: R) -> Result<SectorSpectrum> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("missing column {name:?}")))
    };
    let (mu_col, chi_col) = (col("mu")?, col("chi")?);
    let mut pairs = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let field = |i: usize| rec.get(i).ok_or_else(|| Error::Parse("short row".into()));
        let mu: usize = field(mu_col)?
            .parse()
            .map_err(|e| Error::Parse(format!("mu: {e}")))?;
        let chi: f64 = field(chi_col)?
            .parse()
            .map_err(|e| Error::Parse(format!("chi: {e}")))?;
        pairs.push((mu, chi));
    }
    if pairs.len() < 2 {
        return Err(Error::Parse("need at least two rows".into()));
    }
    let n = pairs.len() - 1;
    let mut weights = vec![None; n + 1];
    for (mu, chi) in pairs {
        match weights.get_mut(mu) {
            Some(slot @ None) => *slot = Some(chi),
            Some(Some(_)) => return Err(Error::Parse(format!("duplicate mu = {mu}"))),
            None => return Err(Error::Parse(format!("mu = {mu} outside 0..={n}"))),
        }
    }
    let weights: Vec<f64> = weights.into_iter().map(|w| w.unwrap_or(0.0)).collect();
    SectorSpectrum::from_weights(&weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_is_fixed() {
        assert_eq!(format_number(0.75), "7.50000000000e-1");
        assert_eq!(format_number(-1234.5), "-1.23450000000e3");
        assert_eq!(format_number(0.0), "0.00000000000e0");
        assert_eq!(format_number(f64::NAN), "nan");
        assert_eq!(format_number(f64::NEG_INFINITY), "-inf");
        assert_eq!(format_count(None), "unreached");
    }

    #[test]
    fn chi_round_trip() {
        let chi = SectorSpectrum::from_weights(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let text = spectrum_table(&chi).to_string_with(&["exported".into()]);
        let back = read_chi_csv(text.as_bytes()).unwrap();
        for (a, b) in chi.to_vec().iter().zip(back.to_vec()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn chi_import_rejects_malformed_input() {
        assert!(read_chi_csv("mu,chi\n0,1\n0,1\n".as_bytes()).is_err());
        assert!(read_chi_csv("mu,chi\n0,1\n5,1\n".as_bytes()).is_err());
        assert!(read_chi_csv("mu,chi\n0,1\n1,-1\n".as_bytes()).is_err());
        assert!(read_chi_csv("mu,p\n0,1\n1,1\n".as_bytes()).is_err());
        assert!(read_chi_csv("mu,chi\n0,x\n1,1\n".as_bytes()).is_err());
        assert!(read_chi_csv("".as_bytes()).is_err());
        let ok = read_chi_csv("# note\nchi,mu\n1,1\n3,0\n".as_bytes()).unwrap();
        let v = ok.to_vec();
        assert!((v[0] - 0.75).abs() < 1e-15 && (v[1] - 0.25).abs() < 1e-15);
    }
}
