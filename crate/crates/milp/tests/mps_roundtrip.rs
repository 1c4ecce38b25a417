use iesplan_milp::{parse_mps, write_mps, Problem, Row, Sense, VarKind};
use proptest::prelude::*;

fn value() -> impl Strategy<Value = f64> {
    prop_oneof![(-1000i32..1000).prop_map(|v| v as f64), -1e6f64..1e6, Just(0.1 + 0.2), Just(1e-300), Just(-7.25e12),]
}

fn column() -> impl Strategy<Value = (u8, f64, f64, f64)> {
    (0u8..6, value(), value(), value())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn parse_inverts_write(
        cols in prop::collection::vec(column(), 0..8),
        rows in prop::collection::vec((prop::collection::vec((0usize..8, value()), 0..6), 0u8..3, value(), prop::option::of(value())), 0..6),
    ) {
        let mut p = Problem::new("fuzz");
        for (k, &(kind, a, b, c)) in cols.iter().enumerate() {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (kind, lo, hi) = match kind {
                0 => (VarKind::Continuous, lo, hi),
                1 => (VarKind::Continuous, f64::NEG_INFINITY, hi),
                2 => (VarKind::Continuous, lo, f64::INFINITY),
                3 => (VarKind::Integer, lo.floor(), hi.ceil()),
                4 => (VarKind::Binary, 0.0, 1.0),
                _ => (VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY),
            };
            p.add_column(format!("c{k}"), lo, hi, kind, c);
        }
        for (k, (coeffs, s, rhs, range)) in rows.iter().enumerate() {
            let mut seen = std::collections::HashSet::new();
            let coeffs: Vec<(usize, f64)> = coeffs
                .iter()
                .filter(|(j, _)| *j < cols.len() && seen.insert(*j))
                .cloned()
                .collect();
            let sense = [Sense::Le, Sense::Ge, Sense::Eq][*s as usize];
            let mut row = Row::new(format!("r{k}"), coeffs, sense, *rhs);
            row.range = *range;
            p.add_row(row);
        }
        let text = write_mps(&p).unwrap();
        let back = parse_mps(&text).unwrap();
        prop_assert_eq!(back, p);
    }
}
