use mpcgs::data_io::{parse_libsvm, read_trace, write_libsvm, write_trace, TraceFormat};
use mpcgs::problems::Dataset;
use mpcgs::{OracleCounters, TraceRecord};
use proptest::prelude::*;

/// A LIBSVM document with comments, blank lines and labels in arbitrary order.
fn fixture() -> impl Strategy<Value = String> {
    let label = prop_oneof![Just(-1.0f64), Just(1.0), Just(3.0), Just(7.5), Just(-12.0), Just(0.0)];
    let row = (
        label,
        prop::collection::btree_map(1usize..40, -1e3f64..1e3, 0..8),
        any::<bool>(),
        any::<bool>(),
    );
    prop::collection::vec(row, 1..30).prop_map(|rows| {
        let mut s = String::from("# generated fixture\n");
        for (label, feats, blank, comment) in rows {
            if blank {
                s.push_str("\n  \n");
            }
            s.push_str(&label.to_string());
            for (i, v) in feats {
                s.push_str(&format!("  {i}:{v}"));
            }
            if comment {
                s.push_str("   # trailing note");
            }
            s.push('\n');
        }
        s
    })
}

fn same(a: &Dataset, b: &Dataset) -> bool {
    a.n() == b.n()
        && a.d() == b.d()
        && a.classes() == b.classes()
        && a.labels() == b.labels()
        && (0..a.n()).all(|i| a.features().row(i) == b.features().row(i))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn libsvm_round_trip(text in fixture()) {
        let first = parse_libsvm(text.as_bytes(), Some(40)).unwrap();
        let mut out = Vec::new();
        write_libsvm(&first, &mut out).unwrap();
        let second = parse_libsvm(out.as_slice(), Some(40)).unwrap();
        prop_assert!(same(&first, &second));
        let mut again = Vec::new();
        write_libsvm(&second, &mut again).unwrap();
        prop_assert_eq!(out, again);
    }

    #[test]
    fn trace_round_trip(recs in prop::collection::vec(
        (any::<u32>(), 0.0f64..1e6, -1e3f64..1e3, prop::option::of(0.0f64..1e9), any::<[u32; 4]>()), 0..20),
        json in any::<bool>())
    {
        let records: Vec<TraceRecord> = recs
            .into_iter()
            .map(|(k, wall_ms, fw_gap, theory_bound, c)| TraceRecord {
                k: k as u64,
                wall_ms,
                fw_gap,
                theory_bound,
                counters: OracleCounters { fo: c[0] as u64, sfo: c[1] as u64, ifo: c[2] as u64, lo: c[3] as u64 },
            })
            .collect();
        let fmt = if json { TraceFormat::Json } else { TraceFormat::Csv };
        let mut out = Vec::new();
        write_trace(&records, fmt, &mut out).unwrap();
        prop_assert_eq!(read_trace(out.as_slice(), fmt).unwrap(), records);
    }
}

#[test]
fn labels_keep_numeric_order() {
    let d = parse_libsvm("10 1:1\n-2 1:1\n3 2:1\n10 1:2\n".as_bytes(), None).unwrap();
    assert_eq!(d.classes(), &[-2.0, 3.0, 10.0]);
    assert_eq!(d.labels(), &[2, 0, 1, 2]);
}

#[test]
fn bad_trace_header() {
    let text = "k,wall,fw_gap\n1,2,3\n";
    assert!(matches!(read_trace(text.as_bytes(), TraceFormat::Csv), Err(mpcgs::Error::Parse { .. })));
}

#[test]
fn format_from_extension() {
    assert_eq!(TraceFormat::from_path("a/b.json".as_ref()), TraceFormat::Json);
    assert_eq!(TraceFormat::from_path("a/b.csv".as_ref()), TraceFormat::Csv);
    assert_eq!(TraceFormat::from_path("trace".as_ref()), TraceFormat::Csv);
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let rec = TraceRecord { k: 3, wall_ms: 1.25, fw_gap: 0.5, theory_bound: Some(2.0), counters: OracleCounters::new() };
    write_trace(std::slice::from_ref(&rec), TraceFormat::from_path(&path), std::fs::File::create(&path).unwrap()).unwrap();
    let back = read_trace(std::fs::File::open(&path).unwrap(), TraceFormat::Json).unwrap();
    assert_eq!(back, vec![rec]);
}
