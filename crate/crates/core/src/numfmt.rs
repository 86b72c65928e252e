//! Number formatting for the CSV outputs.

/// 17 significant digits in scientific notation: enough to round-trip any
/// f64 exactly.
pub(crate) fn g17(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::g17;

    #[test]
    fn g17_round_trips() {
        for v in [0.0, 0.82, 1.0 / 3.0, 2.0117973905426254, 1e-300, -17.25] {
            let s = g17(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{s}");
        }
    }
}
