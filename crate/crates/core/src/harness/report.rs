use std::fmt::Write;

use serde_json::Value;

use super::{CertificateReport, FuzzReport, HarnessError, NecessityBundle, SufficiencyBundle, Verdict};

/// Plain-text table with left-aligned, space-padded columns.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<String>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_owned()
    };
    let mut out = line(header.iter().map(|h| h.to_string()).collect());
    out.push('\n');
    out.push_str(&line(widths.iter().map(|&w| "-".repeat(w)).collect()));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.clone()));
        out.push('\n');
    }
    out
}

#[derive(Default)]
struct Loaded {
    necessity: Vec<NecessityBundle>,
    sufficiency: Vec<SufficiencyBundle>,
    certificates: Vec<CertificateReport>,
    fuzz: Vec<FuzzReport>,
}

fn load(values: &[Value]) -> Result<Loaded, HarnessError> {
    let mut l = Loaded::default();
    let bad = |e: serde_json::Error| HarnessError::InvalidParameter(format!("malformed report: {e}"));
    for v in values {
        match v.get("kind").and_then(Value::as_str) {
            Some("necessity") => l.necessity.push(serde_json::from_value(v.clone()).map_err(bad)?),
            Some("sufficiency") => l.sufficiency.push(serde_json::from_value(v.clone()).map_err(bad)?),
            Some("certificates") => l.certificates.push(serde_json::from_value(v.clone()).map_err(bad)?),
            Some("fuzz") => l.fuzz.push(serde_json::from_value(v.clone()).map_err(bad)?),
            other => {
                return Err(HarnessError::InvalidParameter(format!("unknown report kind {other:?}")));
            }
        }
    }
    Ok(l)
}

fn status(found: bool, ok: bool) -> String {
    match (found, ok) {
        (false, _) => "not run".into(),
        (true, true) => "PASS".into(),
        (true, false) => "FAIL".into(),
    }
}

/// Merge harness JSON reports into text tables: the minimal-architecture
/// matrix, necessity distances, sufficiency outputs, refinement certificates
/// and fuzz tallies.
pub fn render_reports(values: &[Value]) -> Result<String, HarnessError> {
    let l = load(values)?;
    let mut out = String::new();

    let certs: Vec<_> = l.certificates.iter().flat_map(|r| &r.certificates).collect();
    let suff: Vec<_> = l.sufficiency.iter().flat_map(|b| &b.rows).collect();
    let matrix_row = |task: &str, arch: &str, depth: &str, theorem: &str| {
        let c: Vec<_> = certs.iter().filter(|c| c.id.starts_with(theorem)).collect();
        let s: Vec<_> = suff.iter().filter(|s| s.theorem == theorem).collect();
        vec![
            task.to_owned(),
            arch.to_owned(),
            depth.to_owned(),
            status(!c.is_empty(), c.iter().all(|c| c.verdict.passed())),
            status(!s.is_empty(), s.iter().all(|s| s.verdict.passed())),
        ]
    };
    let matrix = vec![
        matrix_row("Dup_1, simple", "reverse", "2", "thm1"),
        matrix_row("Dup_1, multigraph", "reverse+in-ports", "2", "thm2"),
        matrix_row("Dup_r, r >= 2", "reverse+ego", "4", "thm3"),
        matrix_row("Cyc_l, functional", "ego", "l", "thm4"),
    ];
    if !certs.is_empty() || !suff.is_empty() {
        writeln!(out, "Minimal architectures\n").unwrap();
        out.push_str(&table(&["task", "architecture", "depth", "certificates", "construction"], &matrix));
    }

    if !l.necessity.is_empty() {
        let rows: Vec<_> = l
            .necessity
            .iter()
            .flat_map(|b| &b.rows)
            .map(|r| {
                vec![
                    r.row.to_string(),
                    r.adaptations.clone(),
                    format!("{:?}", r.depths),
                    r.seeds.to_string(),
                    if r.max_distance == 0.0 { "0.00".into() } else { format!("{:.3e}", r.max_distance) },
                    r.verdict.to_string(),
                ]
            })
            .collect();
        writeln!(out, "\nNecessity (max target distance over seeds)\n").unwrap();
        out.push_str(&table(&["row", "architecture", "depths", "seeds", "max distance", "verdict"], &rows));
    }

    if !suff.is_empty() {
        let rows: Vec<_> = suff
            .iter()
            .map(|s| {
                vec![
                    s.theorem.clone(),
                    s.parameter.map_or("-".into(), |p| p.to_string()),
                    s.construction.clone(),
                    s.y1.to_string(),
                    s.y2.to_string(),
                    format!("({}, {})", s.expected[0], s.expected[1]),
                    s.verdict.to_string(),
                ]
            })
            .collect();
        writeln!(out, "\nSufficiency\n").unwrap();
        out.push_str(&table(&["theorem", "param", "construction", "y(G1)", "y(G2)", "expected", "verdict"], &rows));
    }

    if !certs.is_empty() {
        let rows: Vec<_> = certs
            .iter()
            .map(|c| {
                let depths = match c.depths.as_slice() {
                    [d] => d.to_string(),
                    ds => format!("{}..={}", ds[0], ds[ds.len() - 1]),
                };
                vec![
                    c.id.clone(),
                    format!("{:?}", c.expected).to_lowercase(),
                    depths,
                    c.first_separation.map_or("-".into(), |d| d.to_string()),
                    c.verdict.to_string(),
                ]
            })
            .collect();
        writeln!(out, "\nRefinement certificates\n").unwrap();
        out.push_str(&table(&["certificate", "expected", "depths", "separates at", "verdict"], &rows));
        for r in &l.certificates {
            writeln!(out, "\nnote: {}", r.note).unwrap();
        }
    }

    for f in &l.fuzz {
        let rows: Vec<_> = f
            .checks
            .iter()
            .map(|c| vec![c.check.clone(), c.comparisons.to_string(), c.positives.to_string(), c.failures.to_string()])
            .collect();
        writeln!(out, "\nFuzz (seed {}, {} graphs per family)\n", f.options.seed, f.options.n_graphs).unwrap();
        out.push_str(&table(&["check", "comparisons", "expected true", "failures"], &rows));
    }

    let overall = Verdict::all(
        l.necessity
            .iter()
            .map(|b| b.verdict)
            .chain(l.sufficiency.iter().map(|b| b.verdict))
            .chain(l.certificates.iter().map(|r| r.verdict))
            .chain(l.fuzz.iter().map(|r| r.verdict)),
    );
    writeln!(out, "\noverall: {overall}").unwrap();
    Ok(out)
}

/// Overall verdict of a set of reports.
pub fn reports_verdict(values: &[Value]) -> Result<Verdict, HarnessError> {
    let l = load(values)?;
    Ok(Verdict::all(
        l.necessity
            .iter()
            .map(|b| b.verdict)
            .chain(l.sufficiency.iter().map(|b| b.verdict))
            .chain(l.certificates.iter().map(|r| r.verdict))
            .chain(l.fuzz.iter().map(|r| r.verdict)),
    ))
}
