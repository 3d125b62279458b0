//! Shared CSV formatting.

use std::io::Write;

use crate::scalar::Real;

/// Scientific notation with 17 significant digits, enough to round-trip f64.
pub fn fmt_float<T: Real>(x: T) -> String {
    format!("{:.16e}", x.to_f64().unwrap_or(f64::NAN))
}

/// Writes a two-column CSV with the given header.
pub fn write_pairs<T: Real, W: Write>(
    mut w: W,
    header: (&str, &str),
    rows: impl IntoIterator<Item = (T, T)>,
) -> std::io::Result<()> {
    writeln!(w, "{},{}", header.0, header.1)?;
    for (a, b) in rows {
        writeln!(w, "{},{}", fmt_float(a), fmt_float(b))?;
    }
    Ok(())
}
