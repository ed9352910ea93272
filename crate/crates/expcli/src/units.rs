//! Unit-suffixed quantities in experiment files. User-facing powers are in
//! dBm, thresholds in dB; everything is converted to linear Km / mW / ratios.

/// `10^(dB/10)`
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `10 log10(x)`
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// dBm to mW.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    db_to_linear(dbm)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    linear_to_db(mw)
}

/// Noise power in dBm from a density in dBm/Hz over `bandwidth_hz`.
pub fn noise_dbm(density_dbm_per_hz: f64, bandwidth_hz: f64) -> f64 {
    density_dbm_per_hz + linear_to_db(bandwidth_hz)
}

/// Splits `"30 dBm"` into `(30.0, "dBm")`. A bare number gives an empty unit.
pub fn split_quantity(text: &str) -> Option<(f64, &str)> {
    let text = text.trim();
    let end = text
        .char_indices()
        .find(|&(i, c)| {
            !(c.is_ascii_digit() || c == '.' || c == '+' || c == '-' || c == '_')
                && !((c == 'e' || c == 'E') && exponent_follows(&text[i + 1..]))
        })
        .map_or(text.len(), |(i, _)| i);
    let number: f64 = text[..end].replace('_', "").parse().ok()?;
    Some((number, text[end..].trim()))
}

fn exponent_follows(rest: &str) -> bool {
    let rest = rest.strip_prefix(['+', '-']).unwrap_or(rest);
    rest.starts_with(|c: char| c.is_ascii_digit())
}
