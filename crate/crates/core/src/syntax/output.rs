//! Machine- and human-readable renderings of results.

use crate::analysis::ClassReport;
use crate::model::Label;
use crate::query::Verdict;
use crate::repair::RepairSet;

/// One JSON object per line: `{"repair": [labels], "witness": [atoms]}`.
pub fn repairs_jsonl(rs: &RepairSet) -> String {
    let mut out = String::new();
    for r in rs.iter() {
        out.push_str(&serde_json::to_string(r).expect("repairs serialize"));
        out.push('\n');
    }
    out
}

fn labels(ls: &[Label]) -> String {
    let names: Vec<&str> = ls.iter().map(Label::as_str).collect();
    format!("{{{}}}", names.join(", "))
}

pub fn repairs_text(rs: &RepairSet) -> String {
    let mut out = format!("{} repair(s) under {}\n", rs.len(), rs.preference.kind);
    for r in rs.iter() {
        out.push_str(&format!("{}\n  witness: {}\n", labels(&r.rules), r.witness));
    }
    out
}

pub fn verdict_json(v: &Verdict) -> String {
    serde_json::to_string(v).expect("verdicts serialize")
}

pub fn verdict_text(v: &Verdict) -> String {
    let mut out = format!(
        "{} ({} repair(s) examined)\n",
        if v.entailed { "entailed" } else { "not entailed" },
        v.repairs_examined
    );
    if let Some(c) = &v.countermodel {
        out.push_str(&format!("countermodel repair: {}\n  model: {}\n  {}\n", labels(&c.repair), c.model, c.reason));
    }
    for w in &v.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    out
}

pub fn report_json(r: &ClassReport) -> String {
    serde_json::to_string_pretty(r).expect("reports serialize")
}

pub fn report_text(r: &ClassReport) -> String {
    let mut out = format!("R-acyclic: {}\n", r.r_acyclic);
    match &r.r_stratification {
        Some(p) => {
            let blocks: Vec<String> = p.iter().map(|b| labels(b)).collect();
            out.push_str(&format!("R-stratified: true  {}\n", blocks.join(" < ")));
        }
        None => out.push_str("R-stratified: false\n"),
    }
    out.push_str(&format!("guarded: {}\n", r.guarded));
    match &r.stratified {
        Some(l) => {
            let levels: Vec<String> = l.iter().map(|(p, n)| format!("{p}={n}")).collect();
            out.push_str(&format!("stratified: true  {}\n", levels.join(" ")));
        }
        None => out.push_str("stratified: false\n"),
    }
    let edges = |es: &std::collections::BTreeSet<(Label, Label)>| -> String {
        es.iter().map(|(a, b)| format!("{a}->{b}")).collect::<Vec<_>>().join(" ")
    };
    out.push_str(&format!("positive reliance: {}\n", edges(&r.reliance.pos_edges)));
    out.push_str(&format!("negative reliance: {}\n", edges(&r.reliance.neg_edges)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PreferenceKind;
    use crate::repair::{preferred_repairs, SearchConfig};
    use crate::syntax::{parse_database, parse_program};

    #[test]
    fn weight_repair_as_json_line() {
        let doc = parse_program(include_str!("../../../../data/ex1.rules")).unwrap();
        let db = parse_database("Bat(a). Mammal(a).").unwrap();
        let rs = preferred_repairs(&db, &doc.rules, &doc.preference(PreferenceKind::Weight).unwrap(), &SearchConfig::default())
            .unwrap();
        let text = repairs_jsonl(&rs);
        assert_eq!(text.lines().count(), 1);
        let v: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(v["repair"], serde_json::json!(["r2", "r3", "r4", "r5", "r6", "r7"]));
        assert!(v["witness"].as_array().unwrap().contains(&serde_json::json!("Bat(a)")));
    }
}
