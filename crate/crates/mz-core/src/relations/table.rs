//! Rendering of relation records as CSV, JSON, and markdown tables.

use serde_json::json;

use crate::error::{Error, Result};
use crate::laurent::CfVerdict;
use crate::polyring::PolyRing;
use crate::relations::search::RelationRecord;

/// Single-character provenance marker used in the markdown table.
pub fn marker(tags: &[String]) -> &'static str {
    let has = |t: &str| tags.iter().any(|x| x == t);
    if has("thm1") || has("thm2") || has("thm3") || has("main") {
        "+"
    } else if has("f1") || has("f21") {
        "\u{2020}" // dagger
    } else if has("f2") || has("f3") || has("f4") {
        "\u{2021}" // double dagger
    } else if has("conjecture") {
        "C"
    } else if has("closure") {
        "\u{00a7}" // section sign
    } else if has("external") {
        "*"
    } else {
        "?"
    }
}

fn verdict_str(v: CfVerdict) -> &'static str {
    match v {
        CfVerdict::Rational => "rational",
        CfVerdict::Irrational => "irrational",
        CfVerdict::Inconclusive => "inconclusive",
    }
}

fn comp_str(comp: &[u64]) -> String {
    comp.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ")
}

/// CSV with one row per record; compositions are space-separated part
/// lists, the factor is split into numerator and denominator polynomials.
pub fn to_csv(ring: &PolyRing, records: &[RelationRecord]) -> String {
    let mut out = String::from(
        "q,left,right,weight,verdict,factor_num,factor_den,tags,precision\n",
    );
    for r in records {
        let (num, den) = match &r.factor {
            Some(f) => (ring.fmt_poly(f.num()), ring.fmt_poly(f.den())),
            None => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.q,
            comp_str(&r.left),
            comp_str(&r.right),
            r.weight,
            verdict_str(r.verdict),
            num,
            den,
            r.tags.join("|"),
            r.precision_used,
        ));
    }
    out
}

/// JSON document (schema "mz/1") carrying the full record list.
pub fn to_json(ring: &PolyRing, records: &[RelationRecord]) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = records
        .iter()
        .map(|r| {
            json!({
                "left": r.left,
                "right": r.right,
                "weight": r.weight,
                "verdict": verdict_str(r.verdict),
                "factor": r.factor.as_ref().map(|f| json!({
                    "num": ring.fmt_poly(f.num()),
                    "den": ring.fmt_poly(f.den()),
                })),
                "tags": r.tags,
                "precision": r.precision_used,
            })
        })
        .collect();
    json!({
        "schema": "mz/1",
        "q": records.first().map(|r| r.q),
        "records": rows,
    })
}

/// Markdown table with provenance markers.
pub fn to_markdown(ring: &PolyRing, records: &[RelationRecord]) -> String {
    // self-produced documents always round-trip
    markdown_from_json(&to_json(ring, records), false).expect("well-formed document")
}

/// Markdown view of an "mz/1" document (the shape `to_json` emits), so a
/// saved search artifact can be re-rendered without recomputation. With
/// `rational_only`, rows whose verdict is not "rational" are dropped.
pub fn markdown_from_json(doc: &serde_json::Value, rational_only: bool) -> Result<String> {
    let bad = |msg: &str| Error::Parse(format!("mz/1 document: {msg}"));
    match doc.get("schema").and_then(|s| s.as_str()) {
        Some("mz/1") => {}
        Some(other) => return Err(bad(&format!("unsupported schema {other:?}"))),
        None => return Err(bad("missing schema field")),
    }
    let records = doc
        .get("records")
        .and_then(|r| r.as_array())
        .ok_or_else(|| bad("missing records array"))?;

    let comp_of = |v: &serde_json::Value, which: &str| -> Result<String> {
        let parts = v.as_array().ok_or_else(|| bad(&format!("{which} is not an array")))?;
        let mut words = Vec::with_capacity(parts.len());
        for p in parts {
            words.push(
                p.as_u64().ok_or_else(|| bad(&format!("{which} part is not an integer")))?
                    .to_string(),
            );
        }
        Ok(words.join(" "))
    };

    let mut out = String::from("| w | left | right | factor | tags |\n|---|---|---|---|---|\n");
    for r in records {
        let verdict = r
            .get("verdict")
            .and_then(|v| v.as_str())
            .ok_or_else(|| bad("record lacks a verdict"))?;
        if rational_only && verdict != "rational" {
            continue;
        }
        let weight = r
            .get("weight")
            .and_then(|w| w.as_u64())
            .ok_or_else(|| bad("record lacks a weight"))?;
        let tags: Vec<String> = match r.get("tags") {
            Some(serde_json::Value::Array(xs)) => xs
                .iter()
                .map(|x| {
                    x.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| bad("tag is not a string"))
                })
                .collect::<Result<_>>()?,
            _ => Vec::new(),
        };
        let factor = match r.get("factor") {
            Some(serde_json::Value::Object(f)) => {
                let num = f
                    .get("num")
                    .and_then(|x| x.as_str())
                    .ok_or_else(|| bad("factor lacks num"))?;
                let den = f
                    .get("den")
                    .and_then(|x| x.as_str())
                    .ok_or_else(|| bad("factor lacks den"))?;
                if den == "1" {
                    num.to_string()
                } else {
                    format!("({num}) / ({den})")
                }
            }
            _ => String::new(),
        };
        out.push_str(&format!(
            "| {} {} | ({}) | ({}) | {} | {} |\n",
            weight,
            marker(&tags),
            comp_of(r.get("left").unwrap_or(&serde_json::Value::Null), "left")?,
            comp_of(r.get("right").unwrap_or(&serde_json::Value::Null), "right")?,
            factor,
            tags.join(", "),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::polyring::RationalFunction;

    fn record(ring: &PolyRing, tags: &[&str]) -> RelationRecord {
        RelationRecord {
            q: ring.q(),
            left: vec![2, 3],
            right: vec![3, 2],
            weight: 5,
            verdict: CfVerdict::Rational,
            factor: Some(RationalFunction::one(ring)),
            tags: tags.iter().map(|s| s.to_string()).collect(),
            precision_used: 256,
        }
    }

    #[test]
    fn markers_follow_tag_priorities() {
        assert_eq!(marker(&["thm1".into()]), "+");
        assert_eq!(marker(&["f1".into()]), "\u{2020}");
        assert_eq!(marker(&["f3".into()]), "\u{2021}");
        assert_eq!(marker(&["conjecture".into()]), "C");
        assert_eq!(marker(&["closure".into()]), "\u{00a7}");
        assert_eq!(marker(&["external".into()]), "*");
        assert_eq!(marker(&["unexplained".into()]), "?");
    }

    #[test]
    fn csv_and_json_shapes() {
        let ring = PolyRing::new(FieldSpec::parse("2").unwrap());
        let recs = vec![record(&ring, &["thm1"])];
        let csv = to_csv(&ring, &recs);
        assert!(csv.starts_with("q,left,right,weight,"));
        assert!(csv.contains("2,2 3,3 2,5,rational,1,1,thm1,256"));
        let j = to_json(&ring, &recs);
        assert_eq!(j["schema"], "mz/1");
        assert_eq!(j["records"][0]["weight"], 5);
        let md = to_markdown(&ring, &recs);
        assert!(md.contains("| 5 + | (2 3) | (3 2) |"));
    }

    #[test]
    fn markdown_view_of_saved_document_filters_non_rational() {
        let ring = PolyRing::new(FieldSpec::parse("2").unwrap());
        let mut recs = vec![record(&ring, &["main"])];
        let mut neg = record(&ring, &[]);
        neg.verdict = CfVerdict::Irrational;
        neg.factor = None;
        recs.push(neg);
        let doc = to_json(&ring, &recs);
        let all = markdown_from_json(&doc, false).unwrap();
        let pos = markdown_from_json(&doc, true).unwrap();
        assert_eq!(all, to_markdown(&ring, &recs));
        assert_eq!(all.lines().count(), 4);
        assert_eq!(pos.lines().count(), 3);
        assert!(markdown_from_json(&serde_json::json!({"schema": "x"}), false).is_err());
    }
}
