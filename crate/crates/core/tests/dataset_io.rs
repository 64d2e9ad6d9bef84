mod common;

use std::fs;

use hyperattr::dataset::{
    generate_synthetic, load_dataset, read_attribute_matrix, read_f64_matrix, read_labels, read_noise_mask,
    write_attribute_matrix, write_f64_matrix, write_labels, write_noise_mask, Format, SyntheticSpec,
};
use hyperattr::Error;
use ndarray::Array2;
use proptest::prelude::*;

fn finite_matrix() -> impl Strategy<Value = Array2<f64>> {
    (1usize..8, 1usize..6).prop_flat_map(|(r, c)| {
        let value = prop_oneof![
            any::<f64>().prop_filter("finite", |v| v.is_finite()),
            -1e3f64..1e3,
            Just(0.0),
            Just(-0.0),
            Just(f64::MIN_POSITIVE),
        ];
        prop::collection::vec(value, r * c).prop_map(move |v| Array2::from_shape_vec((r, c), v).unwrap())
    })
}

fn bit_exact(a: &Array2<f64>, b: &Array2<f64>) -> bool {
    a.dim() == b.dim() && a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits())
}

proptest! {
    #![proptest_config(common::cases(64))]

    #[test]
    fn real_matrices_round_trip(m in finite_matrix()) {
        let dir = tempfile::tempdir().unwrap();
        for format in [Format::Csv, Format::Binary] {
            let path = dir.path().join(format!("m.{}", format.extension()));
            write_f64_matrix(&path, &m, format).unwrap();
            let back = read_f64_matrix(&path, format).unwrap();
            prop_assert!(bit_exact(&m, &back), "{:?}: {:?} vs {:?}", format, m, back);
        }
    }

    #[test]
    fn binary_matrices_and_labels_round_trip(seed in 0u64..1_000_000, r in 1usize..10, c in 1usize..10) {
        let dir = tempfile::tempdir().unwrap();
        let bits = common::random_binary(&mut common::rng(seed), r, c);
        let labels: Vec<usize> = (0..c).map(|i| (i * 7 + seed as usize) % 13).collect();
        for format in [Format::Csv, Format::Binary] {
            let a = dir.path().join(format!("a.{}", format.extension()));
            let y = dir.path().join(format!("y.{}", format.extension()));
            write_attribute_matrix(&a, &bits, format).unwrap();
            write_labels(&y, &labels, format).unwrap();
            prop_assert_eq!(&read_attribute_matrix(&a, format).unwrap(), &bits);
            prop_assert_eq!(&read_labels(&y, format).unwrap(), &labels);
        }
    }
}

#[test]
fn binary_header_layout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.bin");
    write_f64_matrix(&path, &Array2::from_elem((2, 3), 1.5), Format::Binary).unwrap();
    let bytes = fs::read(&path).unwrap();
    assert_eq!(&bytes[..4], b"HNGM");
    assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
    assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 2);
    assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 3);
    assert_eq!(bytes[16], 1);
    assert_eq!(bytes.len(), 17 + 6 * 8);
    assert_eq!(f64::from_le_bytes(bytes[17..25].try_into().unwrap()), 1.5);

    let truncated = dir.path().join("t.bin");
    fs::write(&truncated, &bytes[..30]).unwrap();
    assert!(read_f64_matrix(&truncated, Format::Binary).is_err());
    let wrong = dir.path().join("w.bin");
    fs::write(&wrong, b"NOPE").unwrap();
    assert!(read_f64_matrix(&wrong, Format::Binary).is_err());
}

#[test]
fn small_csv_dataset_loads() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    fs::write(p("x.csv"), "0.1,0.2\n0.3,0.4\n-1,2.5\n").unwrap();
    fs::write(p("y.csv"), "0\n1\n1\n").unwrap();
    fs::write(p("a.csv"), "1,0\n0,1\n").unwrap();
    let (features, attrs) = load_dataset(p("x.csv"), p("y.csv"), p("a.csv"), Format::Csv).unwrap();
    assert_eq!(features.len(), 3);
    assert_eq!(features.class_count(), 2);
    assert_eq!(attrs.attribute_count(), 2);
    assert_eq!(features.labels(), &[0, 1, 1]);
}

#[test]
fn load_errors_carry_context() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    fs::write(p("x.csv"), "0.1,0.2\n0.3,0.4\n").unwrap();
    fs::write(p("y.csv"), "0\n1\n").unwrap();
    fs::write(p("a.csv"), "1,0\n0,2\n").unwrap();
    match load_dataset(p("x.csv"), p("y.csv"), p("a.csv"), Format::Csv) {
        Err(Error::NonBinary { row, col, .. }) => assert_eq!((row, col), (1, 1)),
        other => panic!("expected a non-binary error, got {other:?}"),
    }

    fs::write(p("a.csv"), "1,0\n0,1\n").unwrap();
    fs::write(p("x.csv"), "0.1,0.2\n0.3,abc\n").unwrap();
    match load_dataset(p("x.csv"), p("y.csv"), p("a.csv"), Format::Csv) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected a parse error, got {other:?}"),
    }

    fs::write(p("x.csv"), "0.1,0.2\n0.3,0.4\n").unwrap();
    fs::write(p("y.csv"), "0\n5\n").unwrap();
    assert!(matches!(
        load_dataset(p("x.csv"), p("y.csv"), p("a.csv"), Format::Csv),
        Err(Error::DimensionMismatch(_))
    ));

    let err = load_dataset(p("missing.csv"), p("y.csv"), p("a.csv"), Format::Csv).unwrap_err();
    assert!(err.to_string().contains("missing.csv"));
}

#[test]
fn noise_mask_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mask.csv");
    let cells = vec![(0, 3), (2, 1), (4, 0)];
    write_noise_mask(&path, &cells).unwrap();
    assert!(fs::read_to_string(&path).unwrap().starts_with("attribute_index,sample_index\n"));
    assert_eq!(read_noise_mask(&path).unwrap(), cells);
}

#[test]
fn synthetic_data_is_reproducible_and_consistent() {
    let spec = SyntheticSpec { seed: 77, ..Default::default() };
    let a = generate_synthetic(&spec).unwrap();
    let b = generate_synthetic(&spec).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.noise_mask.len(), 400);
    assert_eq!(a.observed.differing_cells(&a.ground_truth), a.noise_mask);
    // ground truth is the class column of every sample
    for (s, &y) in a.features.labels().iter().enumerate() {
        for m in 0..spec.attribute_count {
            assert_eq!(a.ground_truth.get(m, s), a.class_attrs.values()[[m, y]]);
        }
    }
    let mut columns: Vec<Vec<u8>> = a.class_attrs.values().columns().into_iter().map(|c| c.to_vec()).collect();
    assert!(columns.iter().all(|c| c.iter().any(|&v| v == 1)));
    columns.sort();
    columns.dedup();
    assert_eq!(columns.len(), spec.cluster_count);
}
