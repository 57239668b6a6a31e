//! Ingestion of a synthetic file laid out like the UCI dermatology data.

use std::io::Write;

use kgroups_harness::dermatology::{load_dermatology, run_dermatology, sha256_hex, ATTRIBUTES, CLASSES, RECORDS};
use kgroups_harness::{Algorithm, HarnessError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MISSING_AGE: [usize; 8] = [33, 34, 35, 36, 262, 263, 264, 265];

fn fixture() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut out = String::new();
    for i in 0..RECORDS {
        let class = i % CLASSES + 1;
        let mut fields: Vec<String> = (0..ATTRIBUTES - 1)
            .map(|c| {
                // attributes 2·class-1 and 2·class carry the class signal
                let signal = if c / 2 == class - 1 { 2 } else { 0 };
                (signal + rng.gen_range(0..=1)).to_string()
            })
            .collect();
        fields.push(if MISSING_AGE.contains(&i) { "?".into() } else { rng.gen_range(1..80).to_string() });
        fields.push(class.to_string());
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn write(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn drops_missing_ages_and_standardizes() {
    let f = write(&fixture());
    let d = load_dermatology(f.path(), None).unwrap();
    assert_eq!(d.sample.data.nrows(), 358);
    assert_eq!(d.sample.data.ncols(), 34);
    assert_eq!(d.dropped_lines, MISSING_AGE.iter().map(|i| i + 1).collect::<Vec<_>>());
    let mut classes = d.sample.truth.clone();
    classes.sort_unstable();
    classes.dedup();
    assert_eq!(classes, (0..6).collect::<Vec<_>>());

    let n = d.sample.data.nrows();
    for c in 0..34 {
        let col: Vec<f64> = d.sample.data.rows().map(|r| r[c]).collect();
        let mean = col.iter().sum::<f64>() / n as f64;
        let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        assert!(mean.abs() <= 1e-10, "column {c}: mean {mean}");
        assert!((sd - 1.0).abs() <= 1e-10, "column {c}: sd {sd}");
    }
    assert_eq!(d.sha256, sha256_hex(fixture().as_bytes()));
}

#[test]
fn sidecar_digest_is_checked() {
    let f = write(&fixture());
    let mut side = f.path().as_os_str().to_owned();
    side.push(".sha256");
    std::fs::write(&side, format!("{}  dermatology.data\n", sha256_hex(fixture().as_bytes()))).unwrap();
    assert!(load_dermatology(f.path(), None).is_ok());
    std::fs::write(&side, "deadbeef\n").unwrap();
    let err = load_dermatology(f.path(), None).unwrap_err();
    assert!(matches!(err, HarnessError::Dataset { .. }), "{err}");
    std::fs::remove_file(side).unwrap();
}

#[test]
fn non_numeric_attribute_is_located() {
    let text = fixture().replacen("\n", "\n1,x,", 1);
    let f = write(&text);
    // the second line now has one field too many
    assert!(matches!(load_dermatology(f.path(), None), Err(HarnessError::Ingestion { row: 2, .. })));

    let mut lines: Vec<String> = fixture().lines().map(str::to_owned).collect();
    lines[0] = lines[0].replacen('0', "zero", 1).replacen('1', "zero", 1);
    let f = write(&(lines.join("\n") + "\n"));
    match load_dermatology(f.path(), None) {
        Err(HarnessError::Ingestion { row: 1, column, .. }) => assert!(column <= 34),
        other => panic!("{other:?}"),
    }
}

#[test]
fn clusters_the_fixture() {
    let f = write(&fixture());
    let d = load_dermatology(f.path(), None).unwrap();
    let res = run_dermatology(&d.sample, &Algorithm::ALL, 3, 1).unwrap();
    assert_eq!(res.len(), 3);
    for r in &res {
        assert!((0.0..=1.0).contains(&r.scores.rand));
        assert!(r.scores.crand <= 1.0);
    }
    assert!(res[0].scores.crand > 0.5, "{:?}", res[0]);
}
