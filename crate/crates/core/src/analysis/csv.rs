//! CSV renderings of the profiles. Rationals are written as `p/q`; the one
//! decimal column is truncated toward zero at 12 significant digits.

use super::{DensityPoint, SeriesRow, WindowPoint};

const DIGITS: usize = 12;

fn render<const N: usize>(header: [&str; N], rows: impl Iterator<Item = [String; N]>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

pub fn window_csv(rows: &[WindowPoint]) -> String {
    render(
        ["t", "measure_num", "measure_den", "lower_decimal"],
        rows.iter().map(|r| {
            [r.t.to_string(), r.measure.numer().to_string(), r.measure.denom().to_string(), r.measure.to_decimal(DIGITS)]
        }),
    )
}

pub fn density_csv(rows: &[DensityPoint]) -> String {
    render(["t", "lower", "upper"], rows.iter().map(|r| [r.t.to_string(), r.lower.to_string(), r.upper.to_string()]))
}

pub fn series_csv(rows: &[SeriesRow]) -> String {
    render(
        ["n", "term_lo", "term_hi", "cumsum_lo", "cumsum_hi"],
        rows.iter().map(|r| {
            [
                r.n.to_string(),
                r.term.lo.to_string(),
                r.term.hi.to_string(),
                r.cumsum.lo.to_string(),
                r.cumsum.hi.to_string(),
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::Rational;

    #[test]
    fn window_rows() {
        let rows = [WindowPoint { t: Rational::frac(1, 8), measure: Rational::frac(2, 3) }];
        assert_eq!(window_csv(&rows), "t,measure_num,measure_den,lower_decimal\n1/8,2,3,0.666666666666\n");
    }
}
