//! Property check for the CSV round-trip guarantee: `write_csv` uses the
//! shortest representation that parses back to the same bits, so a
//! write/load cycle must reproduce every number exactly.

use nalgebra::DMatrix;
use proptest::prelude::*;

use ppp_core::data::ObservedSample;

fn finite_f64() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e15..1e15f64,
        -1.0..1.0f64,
        Just(0.0),
        Just(f64::MIN_POSITIVE),
        (-300..300i32).prop_map(|e| 1.37f64 * 10f64.powi(e)),
    ]
}

fn sample_strategy() -> impl Strategy<Value = ObservedSample> {
    (2usize..12, 0usize..4).prop_flat_map(|(n, d)| {
        (
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec(finite_f64(), n),
            proptest::collection::vec(finite_f64(), n * d),
        )
            .prop_map(move |(mut z_bool, y, cells)| {
                // force both arms nonempty so the sample is valid
                z_bool[0] = true;
                z_bool[1] = false;
                ObservedSample {
                    z: z_bool.into_iter().map(u8::from).collect(),
                    y,
                    x: DMatrix::from_row_slice(n, d, &cells),
                    labels: (1..=d).map(|j| format!("x{j}")).collect(),
                }
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_write_load_is_exact(sample in sample_strategy()) {
        let file = tempfile::NamedTempFile::new().unwrap();
        let mut buf = Vec::new();
        sample.write_csv(&mut buf).unwrap();
        std::fs::write(file.path(), &buf).unwrap();
        let back = ObservedSample::load_csv(file.path()).unwrap();
        prop_assert_eq!(&back.z, &sample.z);
        prop_assert_eq!(&back.labels, &sample.labels);
        for i in 0..sample.n() {
            prop_assert_eq!(back.y[i].to_bits(), sample.y[i].to_bits());
            for j in 0..sample.d() {
                prop_assert_eq!(back.x[(i, j)].to_bits(), sample.x[(i, j)].to_bits());
            }
        }
    }
}
