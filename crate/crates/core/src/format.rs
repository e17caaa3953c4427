//! Number rendering shared by the CSV writers.

/// Scientific notation with 17 significant digits, enough to round-trip
/// any `f64`.
pub fn sci17(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_binary64() {
        for v in [0.1, -1.4603545088095868, 1e-300, 6.02214076e23, 0.0] {
            assert_eq!(sci17(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(sci17(0.5), "5.0000000000000000e-1");
    }
}
