//! Shape and coverage of the audit reports: the grid visits exactly the
//! admissible tuples, the JSON/CSV serializations carry the documented
//! fields, and reruns are byte-identical.

use std::collections::BTreeSet;

use volkenborn::audit::{
    audit_grid, audit_hardy_identity, reduction_audit, reports_to_csv, reports_to_json,
};
use volkenborn::classical::{CoprimePair, HardyKind};

#[test]
fn grid_rows_are_exactly_the_admissible_tuples() {
    let kmax = 6i64;
    let pset = [3u64, 5];
    let reports = audit_grid(kmax, &pset, 50).unwrap();

    let mut seen: BTreeSet<(String, i64, i64, u64)> = BTreeSet::new();
    for r in &reports {
        let h = r.params["h"].as_i64().unwrap();
        let k = r.params["k"].as_i64().unwrap();
        let p = r.params["p"].as_u64().unwrap();
        let kind = r
            .params
            .get("kind")
            .map(|v| v.as_str().unwrap().to_string())
            .unwrap_or_default();
        assert!(
            seen.insert((format!("{}:{kind}", r.identity), h, k, p)),
            "duplicate row {} {kind} h={h} k={k} p={p}",
            r.identity
        );
    }

    let mut expected = 0usize;
    for k in 1..=kmax {
        for h in 1..=k {
            if num_integer::gcd(h, k) != 1 {
                continue;
            }
            for p in pset {
                if k % p as i64 == 0 {
                    continue;
                }
                for kind in HardyKind::ALL {
                    if kind.hypothesis_holds(h, k) {
                        expected += 1;
                        assert!(
                            seen.contains(&(
                                format!("hardy_{}_fermionic:{}", kind.name(), kind.name()),
                                h,
                                k,
                                p
                            )),
                            "missing {} row for h={h} k={k} p={p}",
                            kind.name()
                        );
                    }
                }
                if k % 2 == 1 {
                    expected += 1;
                    assert!(
                        seen.contains(&("sawtooth_integral_series:".to_string(), h, k, p)),
                        "missing sawtooth row for h={h} k={k} p={p}"
                    );
                }
            }
        }
    }
    assert_eq!(reports.len(), expected);
}

#[test]
fn json_rows_carry_the_documented_fields() {
    let reports = audit_grid(3, &[5], 50).unwrap();
    let text = reports_to_json(&reports);
    let rows: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), reports.len());
    for row in rows {
        for field in ["identity", "params", "lhs", "rhs", "match", "details"] {
            assert!(row.get(field).is_some(), "row lacks {field}: {row}");
        }
        let m = row["match"].as_str().unwrap();
        assert!(
            [
                "exact",
                "within_tolerance",
                "branch_dependent_mismatch",
                "mismatch"
            ]
            .contains(&m),
            "unknown classification {m}"
        );
    }
}

#[test]
fn csv_quotes_and_expands_branches() {
    let reports = audit_grid(3, &[5], 50).unwrap();
    let csv = reports_to_csv(&reports);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "identity,kind,h,k,m,p,q,w_level,branch,lhs,rhs,match,details"
    );
    // Every data line has 13 fields once quoted commas are accounted for.
    for line in lines {
        let mut fields = 0;
        let mut in_quotes = false;
        for ch in line.chars() {
            match ch {
                '"' => in_quotes = !in_quotes,
                ',' if !in_quotes => fields += 1,
                _ => {}
            }
        }
        assert_eq!(fields, 12, "bad field count in {line:?}");
    }

    // Branch maps become one row per branch.
    let report = audit_hardy_identity(HardyKind::S3, &CoprimePair::new(1, 3).unwrap(), 5).unwrap();
    let csv = reports_to_csv(std::slice::from_ref(&report));
    let data_lines: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(data_lines.len(), 2, "one row per branch:\n{csv}");
    assert!(data_lines[0].contains(",r=1,"));
    assert!(data_lines[1].contains(",r=5,"));
}

#[test]
fn reruns_are_byte_identical() {
    let a = reports_to_json(&audit_grid(5, &[3, 5], 80).unwrap());
    let b = reports_to_json(&audit_grid(5, &[3, 5], 80).unwrap());
    assert_eq!(a, b);
    let c = reports_to_csv(&audit_grid(5, &[3, 5], 80).unwrap());
    let d = reports_to_csv(&audit_grid(5, &[3, 5], 80).unwrap());
    assert_eq!(c, d);
}

#[test]
fn reduction_report_shape() {
    let report = reduction_audit(1, 5, 2, 5, &[2, 4]).unwrap();
    assert_eq!(report.identity, "twisted_dedekind_reduction");
    for field in ["h", "k", "m", "p", "w_level", "ladder"] {
        assert!(report.params.contains_key(field), "params lack {field}");
    }
    let rhs = &report.rhs;
    for field in [
        "ladder",
        "twisted_values",
        "candidate_direct",
        "candidate_scaled_higher_order",
        "valuation_to_direct",
        "valuation_to_scaled",
    ] {
        assert!(rhs.get(field).is_some(), "rhs lacks {field}");
    }
    assert_eq!(rhs["ladder"].as_array().unwrap().len(), 2);
    assert_eq!(rhs["twisted_values"].as_array().unwrap().len(), 2);

    // CSV flattening: one row per rung.
    let csv = reports_to_csv(std::slice::from_ref(&report));
    let data_lines: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(data_lines.len(), 2);
    assert!(data_lines[0].contains(",M=2,"));
    assert!(data_lines[1].contains(",M=4,"));
}

#[test]
fn grid_rejects_bad_parameters() {
    assert!(audit_grid(0, &[3], 50).is_err());
    assert!(audit_grid(4, &[], 50).is_err());
    assert!(audit_grid(4, &[4], 50).is_err());
    assert!(reduction_audit(1, 5, 2, 5, &[2]).is_err());
    assert!(reduction_audit(1, 5, 2, 5, &[4, 2]).is_err());
    assert!(reduction_audit(1, 6, 2, 5, &[2, 4]).is_err());
}
