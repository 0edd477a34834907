use loopcx::battery;
use loopcx::cocycles::Sheet;
use loopcx::io::{read_loop_pairs_csv, read_sheet, write_loop_pairs_csv, write_sheet, LoopPair};
use loopcx::liegroup::MatrixGroupSpec;
use loopcx::report::{Check, Report};
use proptest::prelude::*;
use std::io::BufReader;
use std::sync::Arc;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sheets_round_trip_bit_for_bit(rho in 0.2f64..2.5, k in 4u32..6) {
        let g = Arc::new(MatrixGroupSpec::su2(1.0));
        let m = 1usize << k;
        let sh = battery::enclosing_sheet(&g, m, m, rho).unwrap();
        let mut buf = Vec::new();
        write_sheet(&mut buf, &sh).unwrap();
        let back: Sheet = read_sheet(&mut BufReader::new(&buf[..])).unwrap();
        prop_assert!(back.points() == sh.points());
        prop_assert!(read_sheet(&mut BufReader::new(&buf[..buf.len() - 1])).is_err());
    }

    #[test]
    fn rplus_loop_files_round_trip(seed in any::<u64>(), count in 0usize..5) {
        let pairs: Vec<LoopPair> = battery::rplus_pairs(32, 1.0, 4.5, count, seed).unwrap().into_iter().enumerate()
            .map(|(k, (a, b))| LoopPair { id: format!("p{k}"), a, b })
            .collect();
        let text = write_loop_pairs_csv(&pairs).unwrap();
        let g = Arc::new(MatrixGroupSpec::rplus());
        let back = read_loop_pairs_csv(&text, &g).unwrap();
        prop_assert_eq!(back.len(), pairs.len());
        for (x, y) in back.iter().zip(&pairs) {
            prop_assert_eq!(&x.id, &y.id);
            prop_assert!(x.a.samples() == y.a.samples() && x.b.samples() == y.b.samples());
        }
    }

    #[test]
    fn reports_round_trip_through_json(measured in prop::collection::vec(0.0f64..1.0, 0..6), tol in 1e-12f64..1.0) {
        let mut r = Report::new("props");
        for (k, m) in measured.iter().enumerate() {
            r.push(Check::at_most(format!("check {k}"), *m, tol));
        }
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        prop_assert_eq!(back, r);
    }
}
