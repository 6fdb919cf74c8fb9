//! Text formatting shared by every output file.

/// Scientific notation with 17 significant digits; round-trips every `f64`.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for x in [0.1, -1.0 / 3.0, std::f64::consts::TAU, 1e-300, 0.0, f64::MAX] {
            assert_eq!(fmt_real(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_real(0.5), "5.0000000000000000e-1");
    }
}
