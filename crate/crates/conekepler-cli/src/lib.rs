//! Shared plumbing for the `conekepler` binary: trace-row serialization
//! with fixed-width float formatting, input file schemas, and a small SVG
//! emitter.  All writers are deterministic byte-for-byte so that emitted
//! files can be compared and round-tripped exactly.

pub mod input;
pub mod rows;
pub mod svg;

/// Serialize a float with 17 significant digits, enough for the exact bit
/// pattern to survive a parse round trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::fmt_f64;

    #[test]
    fn seventeen_digits_round_trip_exactly() {
        for &x in &[
            0.5,
            -0.0,
            1.0 / 3.0,
            std::f64::consts::PI,
            2.2250738585072014e-308,
            -9.87654321e200,
            1.3333333333333333,
        ] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s} did not round-trip");
        }
    }

    #[test]
    fn formatting_is_scientific_with_sixteen_decimals() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-2.0), "-2.0000000000000000e0");
    }
}
