//! CSV dump of one sampled network, for plotting realizations.

use v2x_core::pointprocess::{to_xy, NetworkRealization};

/// Columns: `kind,line,theta,y,t,x_km,y_km,tx`. Roads carry their `(θ, y)`
/// parameters, vehicles their road and offset, base stations only coordinates.
pub fn write_realization<W: std::io::Write>(
    real: &NetworkRealization,
    out: W,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "line", "theta", "y", "t", "x_km", "y_km", "tx"])?;
    let e = String::new;
    for (i, line) in real.lines.iter().enumerate() {
        let kind = if Some(i) == real.typical_line_index {
            "typical_road"
        } else {
            "road"
        };
        w.write_record([
            kind.to_string(),
            i.to_string(),
            format!("{:e}", line.theta),
            format!("{:e}", line.y),
            e(),
            e(),
            e(),
            e(),
        ])?;
    }
    for (i, ts) in real.vehicles.iter().enumerate() {
        let line = &real.lines[i];
        for (j, &t) in ts.iter().enumerate() {
            let p = to_xy(line, t);
            let tx = real
                .tx_flags
                .get(i)
                .and_then(|f| f.get(j))
                .copied()
                .unwrap_or(true);
            w.write_record([
                "vehicle".to_string(),
                i.to_string(),
                e(),
                e(),
                format!("{t:e}"),
                format!("{:e}", p.x),
                format!("{:e}", p.y),
                (tx as u8).to_string(),
            ])?;
        }
    }
    for b in &real.base_stations {
        w.write_record([
            "base_station".to_string(),
            e(),
            e(),
            e(),
            e(),
            format!("{:e}", b.x),
            format!("{:e}", b.y),
            e(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
