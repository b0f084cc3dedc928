use cavqed_core::correlation::{cross_correlate_tags, normalize_g2_tail};
use cavqed_core::io::{
    curve_from_table, parse_numeric_csv, parse_tags_csv, parse_ttag, read_tag_file, write_g2_csv, write_histogram_csv,
    write_tags_csv, write_ttag,
};
use cavqed_core::sim::TimeTagStream;
use cavqed_core::Error;
use proptest::prelude::*;

fn sorted_unique(mut v: Vec<u64>) -> Vec<u64> {
    v.sort_unstable();
    v.dedup();
    v
}

proptest! {
    #[test]
    fn ttag_bytes_round_trip(channel in any::<u8>(), tags in prop::collection::vec(any::<u64>(), 0..200)) {
        let s = TimeTagStream::new(channel, sorted_unique(tags)).unwrap();
        let mut buf = Vec::new();
        write_ttag(&mut buf, &s).unwrap();
        prop_assert_eq!(buf.len(), 6 + 8 * s.len());
        prop_assert_eq!(parse_ttag(&buf).unwrap(), s);
    }

    #[test]
    fn csv_round_trip(a in prop::collection::vec(0..1u64 << 50, 0..100), b in prop::collection::vec(0..1u64 << 50, 1..100)) {
        let sa = TimeTagStream::new(0, sorted_unique(a)).unwrap();
        let sb = TimeTagStream::new(1, sorted_unique(b)).unwrap();
        let mut buf = Vec::new();
        write_tags_csv(&mut buf, &[&sa, &sb], &["tool: test".into()]).unwrap();
        let parsed = parse_tags_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        let expected: Vec<TimeTagStream> = [sa, sb].into_iter().filter(|s| !s.is_empty()).collect();
        prop_assert_eq!(parsed, expected);
    }

    #[test]
    fn unsorted_binary_reports_offset(tags in prop::collection::vec(1..1u64 << 40, 2..50), at in 1usize..49) {
        let mut tags = sorted_unique(tags);
        prop_assume!(tags.len() >= 2);
        let i = at.min(tags.len() - 1);
        tags[i] = tags[i - 1];
        let mut buf = b"TTAG\x01\x00".to_vec();
        for t in &tags {
            buf.extend_from_slice(&t.to_le_bytes());
        }
        match parse_ttag(&buf) {
            Err(Error::Data(msg)) => prop_assert!(msg.contains(&format!("byte offset {}", 6 + 8 * i)), "{}", msg),
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }
}

#[test]
fn tag_files_detected_by_magic() {
    let dir = tempfile::tempdir().unwrap();
    let s = TimeTagStream::new(3, vec![5, 9, 1000]).unwrap();
    let bin = dir.path().join("a.ttag");
    write_ttag(std::fs::File::create(&bin).unwrap(), &s).unwrap();
    assert_eq!(read_tag_file(&bin).unwrap(), vec![s.clone()]);
    let csv = dir.path().join("a.csv");
    write_tags_csv(std::fs::File::create(&csv).unwrap(), &[&s], &[]).unwrap();
    assert_eq!(read_tag_file(&csv).unwrap(), vec![s]);
    std::fs::write(&csv, "channel,timestamp_ps\n0,10\n0,9\n").unwrap();
    let err = read_tag_file(&csv).unwrap_err().to_string();
    assert!(err.contains("byte offset 26") && err.contains("a.csv"), "{err}");
}

#[test]
fn histogram_and_curve_csv_read_back() {
    let h = cross_correlate_tags(&[0, 1000, 5000], &[200, 1400, 5000], 200, 1000).unwrap();
    let mut buf = Vec::new();
    write_histogram_csv(&mut buf, &h, &["bin_width_ps: 200".into()]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("# bin_width_ps: 200\ndelay_ps,counts\n-1000,"));
    let table = parse_numeric_csv(&text).unwrap();
    let curve = curve_from_table(&table).unwrap();
    assert_eq!(curve.x.len(), h.n_bins());
    assert_eq!(curve.x[0], -1.0);
    assert_eq!(curve.y.iter().sum::<f64>(), h.total() as f64);

    let g2 = normalize_g2_tail(&h, 0.5).unwrap();
    let mut buf = Vec::new();
    write_g2_csv(&mut buf, &g2, &[]).unwrap();
    let table = parse_numeric_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(table.columns, vec!["delay_ns", "g2"]);
    assert_eq!(table.column(1), g2.values);
}
