//! Human-readable rendering of an analysis report: aligned tables, exact
//! values spelled the same way as in the JSON output.

use std::fmt::Write;

use crate::report::AnalysisReport;

fn table(rows: &[Vec<String>]) -> String {
    if rows.is_empty() {
        return String::new();
    }
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut widths = vec![0usize; cols];
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            let _ = write!(line, "{:<width$}", cell, width = widths[i]);
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn opt(v: &Option<String>) -> String {
    v.clone().unwrap_or_else(|| "-".to_string())
}

fn set_str(ids: &[String]) -> String {
    if ids.is_empty() {
        "{}".to_string()
    } else {
        format!("{{{}}}", ids.join(","))
    }
}

fn vec_str(v: &[String]) -> String {
    format!("({})", v.join(","))
}

pub fn render_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} — analysis of {}", r.tool.name, r.tool.version, r.input);
    let _ = writeln!(out);
    let _ = writeln!(out, "graph");
    for line in r.graph.plumb.lines() {
        let _ = writeln!(out, "  {line}");
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "lattice");
    let _ = writeln!(out, "  det            {}", r.lattice.det);
    let _ = writeln!(
        out,
        "  signature      ({}+, {}-, {}0)",
        r.lattice.signature.positive, r.lattice.signature.negative, r.lattice.signature.zero
    );
    let _ = writeln!(
        out,
        "  inv. factors   [{}]",
        r.lattice.invariant_factors.join(", ")
    );
    let _ = writeln!(out, "  |H1|           {}", r.lattice.h1_order);
    let _ = writeln!(out, "  dim H1 (Z/2)   {}", r.lattice.dim_h1_mod2);
    let _ = writeln!(
        out,
        "  H1 reduction   p={} q={} after {} moves",
        r.h1_mod2_reduction.p, r.h1_mod2_reduction.q, r.h1_mod2_reduction.moves
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "rationality: {}", r.rationality.verdict);
    let _ = writeln!(out);
    let _ = writeln!(out, "spin structures ({})", r.spin_structures.count);
    let mut rows = vec![vec![
        "  wu set".to_string(),
        "mubar".to_string(),
        "d".to_string(),
        "d(path)".to_string(),
        "mubar=-4d".to_string(),
        "m".to_string(),
    ]];
    for s in &r.spin_structures.per_spin {
        rows.push(vec![
            format!("  {}", set_str(&s.wu_set)),
            s.mubar.clone(),
            opt(&s.d),
            opt(&s.d_path),
            s.identity_mubar_eq_minus_4d
                .map(|b| if b { "yes" } else { "NO" }.to_string())
                .unwrap_or_else(|| "-".to_string()),
            s.m_counter.to_string(),
        ]);
    }
    out.push_str(&table(&rows));
    if let Some(reason) = &r.spin_structures.d_refused_reason {
        let _ = writeln!(out, "  note: {reason}");
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "spin-c classes ({})", r.spin_c_classes.count);
    match (&r.spin_c_classes.classes, &r.spin_c_classes.omitted_reason) {
        (Some(classes), _) => {
            let mut rows = vec![vec![
                "  representative".to_string(),
                "d".to_string(),
                "spin".to_string(),
            ]];
            for c in classes {
                rows.push(vec![
                    format!("  {}", vec_str(&c.rep)),
                    opt(&c.d),
                    if c.spin {
                        c.wu_set
                            .as_ref()
                            .map(|s| set_str(s))
                            .unwrap_or_else(|| "yes".to_string())
                    } else {
                        "-".to_string()
                    },
                ]);
            }
            out.push_str(&table(&rows));
        }
        (None, Some(reason)) => {
            let _ = writeln!(out, "  omitted: {reason}");
        }
        (None, None) => {}
    }
    let _ = writeln!(out);
    match (&r.obstructions, &r.obstructions_omitted_reason) {
        (Some(o), _) => {
            let _ = writeln!(out, "obstructions (det {})", o.det_parity);
            let _ = writeln!(out, "  mubar product            {}", o.mubar_product);
            let _ = writeln!(
                out,
                "  spin ball obstructed     {}",
                if o.spin_ball_obstructed { "yes" } else { "no" }
            );
            let _ = writeln!(
                out,
                "  any ball obstructed      {}",
                match o.any_ball_obstructed {
                    Some(true) => "yes",
                    Some(false) => "no",
                    None => "not applicable (det even)",
                }
            );
        }
        (None, Some(reason)) => {
            let _ = writeln!(out, "obstructions: {reason}");
        }
        (None, None) => {}
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "theorem check (mubar = -4d): {}", r.theorem_check);
    out
}
