//! CSV and metadata emission. Rows are sorted by key before formatting so
//! CSV bodies are byte-identical for identical experiment specs regardless
//! of execution order.

use std::io::Write;
use std::path::Path;

use crate::Result;

/// One aggregated experiment result.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub method: String,
    pub param1: Option<f64>,
    pub param2: Option<f64>,
    /// Sparsity level `k` or measurement count `m`, depending on context.
    pub k_or_m: usize,
    /// Success rate, MSE, or relative error.
    pub value: f64,
    pub n_trials: usize,
    pub seed: u64,
}

/// Floats carry 17 significant digits so the decimal form round-trips.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Render the shared schema: `method,param1,param2,k_or_m,value,n_trials,seed`.
pub fn format_rows(rows: &[ExperimentRow]) -> String {
    let mut sorted: Vec<&ExperimentRow> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        (&a.method, a.k_or_m, a.param1.map(f64::to_bits), a.param2.map(f64::to_bits))
            .cmp(&(&b.method, b.k_or_m, b.param1.map(f64::to_bits), b.param2.map(f64::to_bits)))
    });
    let mut out = String::from("method,param1,param2,k_or_m,value,n_trials,seed\n");
    for r in sorted {
        let p1 = r.param1.map(fmt17).unwrap_or_default();
        let p2 = r.param2.map(fmt17).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.method,
            p1,
            p2,
            r.k_or_m,
            fmt17(r.value),
            r.n_trials,
            r.seed
        ));
    }
    out
}

/// Write the CSV body plus a flat `key=value` sidecar at `<path>.meta`
/// capturing every parameter and seed.
pub fn write_experiment(
    path: &Path,
    rows: &[ExperimentRow],
    metadata: &[(String, String)],
) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(format_rows(rows).as_bytes())?;
    f.flush()?;

    let meta_path = sidecar_path(path);
    let mut m = std::fs::File::create(meta_path)?;
    for (k, v) in metadata {
        writeln!(m, "{k}={v}")?;
    }
    m.flush()?;
    Ok(())
}

pub(crate) fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".meta");
    std::path::PathBuf::from(os)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(method: &str, k: usize, value: f64) -> ExperimentRow {
        ExperimentRow {
            method: method.to_string(),
            param1: Some(2.0),
            param2: None,
            k_or_m: k,
            value,
            n_trials: 10,
            seed: 7,
        }
    }

    #[test]
    fn formatting_is_order_independent() {
        let a = vec![row("gerf", 2, 1.0), row("lasso", 2, 0.5), row("gerf", 4, 0.75)];
        let mut b = a.clone();
        b.reverse();
        assert_eq!(format_rows(&a), format_rows(&b));
    }

    #[test]
    fn floats_print_17_significant_digits() {
        let s = fmt17(0.1);
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(fmt17(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn header_and_empty_fields() {
        let r = ExperimentRow {
            method: "lasso".into(),
            param1: None,
            param2: None,
            k_or_m: 8,
            value: 0.5,
            n_trials: 3,
            seed: 1,
        };
        let text = format_rows(&[r]);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "method,param1,param2,k_or_m,value,n_trials,seed");
        assert_eq!(lines.next().unwrap(), "lasso,,,8,5.0000000000000000e-1,3,1");
    }
}
