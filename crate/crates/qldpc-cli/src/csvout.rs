//! Result CSV rendering and parsing.
//!
//! Layout: `#`-prefixed provenance comments (config hash, seed, resolved
//! config), then the fixed header row, then one row per (f, mode). LF line
//! endings throughout; float fields use the shortest round-trip decimal
//! form, so identical tables render to identical bytes.

use anyhow::{anyhow, bail, Context, Result};
use qldpc::montecarlo::ResultTable;

pub const CSV_HEADER: &str = "f,f_prime,mode,trials,block_errors,qubit_errors,qber,qber_lo,qber_hi,fer,fer_lo,fer_hi,mean_iters,code_id,seed";

pub fn render_csv(table: &ResultTable, canonical: &[(String, String)], hash: &str) -> String {
    let mut out = String::new();
    out.push_str("# qldpc results v1\n");
    out.push_str(&format!("# code: {}\n", table.code_id));
    out.push_str(&format!("# seed: {}\n", table.master_seed));
    out.push_str(&format!("# config-hash: {hash}\n"));
    for (k, v) in canonical {
        out.push_str(&format!("# config: {k} = {v}\n"));
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            row.f,
            row.f_prime,
            row.mode,
            row.trials,
            row.block_errors,
            row.qubit_errors,
            row.qber,
            row.qber_lo,
            row.qber_hi,
            row.fer,
            row.fer_lo,
            row.fer_hi,
            row.mean_iters,
            table.code_id,
            table.master_seed,
        ));
    }
    out
}

/// One parsed data row, as needed for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub f_prime: f64,
    pub mode: String,
    pub qber: f64,
    pub qber_lo: f64,
    pub qber_hi: f64,
    pub fer: f64,
    pub fer_lo: f64,
    pub fer_hi: f64,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (_, header) = lines.next().ok_or_else(|| anyhow!("no header row"))?;
    if header.trim() != CSV_HEADER {
        bail!("unexpected header row {header:?}");
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 15 {
            bail!("line {}: expected 15 fields, found {}", idx + 1, fields.len());
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .parse()
                .with_context(|| format!("line {}: bad number {:?}", idx + 1, fields[i]))
        };
        rows.push(CsvRow {
            f_prime: num(1)?,
            mode: fields[2].to_string(),
            qber: num(6)?,
            qber_lo: num(7)?,
            qber_hi: num(8)?,
            fer: num(9)?,
            fer_lo: num(10)?,
            fer_hi: num(11)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qldpc::estimation::ProbeMode;
    use qldpc::montecarlo::PointRow;

    fn sample_table() -> ResultTable {
        ResultTable {
            code_id: "five-qubit".into(),
            master_seed: 7,
            rows: vec![PointRow {
                f: 0.2,
                f_prime: 0.15,
                mode: ProbeMode::Perfect,
                trials: 1000,
                block_errors: 100,
                qubit_errors: 321,
                qber: 0.0642,
                qber_lo: 0.058,
                qber_hi: 0.071,
                fer: 0.1,
                fer_lo: 0.083,
                fer_hi: 0.12,
                mean_iters: 3.5,
                max_iterations_seen: 42,
            }],
        }
    }

    #[test]
    fn roundtrip_through_text() {
        let table = sample_table();
        let canonical = vec![("seed".to_string(), "7".to_string())];
        let text = render_csv(&table, &canonical, "deadbeef");
        assert!(text.contains("# config-hash: deadbeef"));
        let rows = parse_csv(&text).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].mode, "perfect");
        assert_eq!(rows[0].f_prime, 0.15);
        assert_eq!(rows[0].fer, 0.1);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv("a,b,c\n1,2,3\n").is_err());
        let text = format!("{CSV_HEADER}\n1,2,perfect\n");
        assert!(parse_csv(&text).is_err());
    }
}
