//! CSV and JSONL serialization of experiment records.

use std::io::{BufRead, Write};

use super::{ExperimentRecord, HarnessError, BOUND_NAMES};

/// Version of the CSV column layout, written as the first line.
pub const CSV_SCHEMA: u32 = 1;

pub const CSV_COLUMNS: [&str; 29] = [
    "family",
    "params",
    "seed",
    "shuffle_ids",
    "n",
    "m",
    "certified_genus",
    "c",
    "t",
    "g",
    "phase2_rule",
    "kv_refresh",
    "d_size",
    "preprocess_size",
    "d_prime_size",
    "total",
    "is_dominating",
    "gamma",
    "ratio",
    "rounds_phase1",
    "rounds_preprocess",
    "rounds_phase2",
    "rounds_total",
    "phase1_bound",
    "total_bound",
    "preprocess_size_check",
    "rounds_check",
    "postprocess_clean",
    "error",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn row(r: &ExperimentRecord) -> Vec<String> {
    let i = &r.instance;
    let cfg = r.config.as_ref();
    let mut out = vec![
        i.family.clone(),
        i.params.clone(),
        i.seed.to_string(),
        opt(i.shuffle_ids),
        i.n.to_string(),
        i.m.to_string(),
        i.certified_genus.to_string(),
        opt(cfg.map(|c| c.c)),
        opt(cfg.map(|c| c.t)),
        opt(cfg.map(|c| c.g)),
        opt(cfg.map(|c| format!("{:?}", c.phase2_rule))),
        opt(cfg.map(|c| format!("{:?}", c.kv_refresh))),
        r.d_size.to_string(),
        r.preprocess_size.to_string(),
        r.d_prime_size.to_string(),
        r.total.to_string(),
        r.is_dominating.to_string(),
        opt(r.gamma),
        opt(r.ratio.map(|x| format!("{x:.6}"))),
        r.rounds_phase1.to_string(),
        r.rounds_preprocess.to_string(),
        r.rounds_phase2.to_string(),
        r.rounds_total.to_string(),
    ];
    for b in BOUND_NAMES {
        out.push(r.bound_checks.get(b).map(|c| c.as_str()).unwrap_or("skipped").into());
    }
    out.push(r.error.clone().unwrap_or_default());
    out
}

/// Writes `# schema=N`, the header and one row per record.
pub fn write_csv<W: Write>(mut w: W, records: &[ExperimentRecord]) -> Result<(), HarnessError> {
    writeln!(w, "# schema={CSV_SCHEMA}")?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(CSV_COLUMNS)?;
    for r in records {
        csv.write_record(row(r))?;
    }
    csv.flush()?;
    Ok(())
}

pub fn write_jsonl<W: Write>(mut w: W, records: &[ExperimentRecord]) -> Result<(), HarnessError> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<ExperimentRecord>, HarnessError> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{Family, GenSpec};
    use crate::harness::{run_instance, ConfigSpec, DEFAULT_ORACLE_BUDGET};

    fn records() -> Vec<ExperimentRecord> {
        [Family::Cycle { n: 7 }, Family::Star { leaves: 4 }]
            .into_iter()
            .map(|f| run_instance(&GenSpec::new(f, 1), &ConfigSpec::default(), 32, DEFAULT_ORACLE_BUDGET))
            .collect()
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &records()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# schema=1"));
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].starts_with("cycle,n=7,1,"));
        assert_eq!(rows[0].split(',').count(), CSV_COLUMNS.len());
    }

    #[test]
    fn jsonl_round_trip() {
        let recs = records();
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &recs).unwrap();
        let back = read_jsonl(buf.as_slice()).unwrap();
        assert_eq!(back, recs);
    }
}
