//! Number formatting and report rendering.

use std::fmt::Write as _;
use std::io::Write;

use qresb_core::policy::{ComparisonReport, Dominance, SweepRow};
use qresb_core::verification::{CheckStatus, VerificationReport};

/// Digits for CSV output.
pub const CSV_DIGITS: usize = 12;
/// Digits for human-readable text.
pub const TEXT_DIGITS: usize = 6;

/// `%.{digits}g`-style formatting: fixed notation for moderate exponents,
/// scientific otherwise, trailing zeros trimmed.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_owned()
        } else if x > 0.0 {
            "inf".to_owned()
        } else {
            "-inf".to_owned()
        };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn text(x: f64) -> String {
    sig(x, TEXT_DIGITS)
}

pub const CSV_HEADER: [&str; 7] = [
    "param", "value", "p", "welfare", "regime", "stable", "residual",
];

/// Writes the sweep table. Rows whose solve failed carry `error` in the
/// regime column and empty numeric cells.
pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> csv::Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    wtr.write_record(CSV_HEADER)?;
    for row in rows {
        let value = sig(row.value, CSV_DIGITS);
        match &row.outcome {
            Ok(pt) => wtr.write_record([
                row.parameter.as_str(),
                &value,
                &sig(pt.p, CSV_DIGITS),
                &sig(pt.welfare, CSV_DIGITS),
                pt.regime.as_str(),
                if pt.stable { "true" } else { "false" },
                &sig(pt.residual, CSV_DIGITS),
            ])?,
            Err(_) => {
                wtr.write_record([row.parameter.as_str(), &value, "", "", "error", "", ""])?
            }
        }
    }
    wtr.flush()?;
    Ok(())
}

pub fn comparison_text(report: &ComparisonReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "threshold tax: {}", text(report.threshold_tax));
    let _ = writeln!(
        s,
        "contraction modulus: {}",
        text(report.contraction_modulus)
    );
    if report.contraction_modulus >= 1.0 {
        let _ = writeln!(
            s,
            "warning: contraction modulus >= 1; gaps use the highest-welfare fixed point per tax"
        );
    }
    let _ = writeln!(
        s,
        "deletion: p = {}, welfare = {}",
        text(report.deletion_p),
        text(report.deletion_welfare)
    );
    for o in &report.tax_equilibria {
        let _ = writeln!(
            s,
            "tax t = {}: p = {}, welfare = {}, regime = {}, stable = {}",
            text(o.t),
            text(o.equilibrium.p),
            text(o.welfare),
            o.regime,
            o.equilibrium.stable
        );
    }
    for g in &report.welfare_gaps {
        let _ = writeln!(s, "gap at t = {}: {}", text(g.t), text(g.gap));
    }
    let min_gap = report
        .min_gap()
        .map(|g| format!("{} at t = {}", text(g.gap), text(g.t)))
        .unwrap_or_else(|| "n/a (no taxes)".to_owned());
    let verdict = match report.dominance {
        Dominance::Certified => "deletion dominance certified".to_owned(),
        Dominance::HypothesisFails => {
            "dominance not certified (welfare monotonicity hypothesis c + d <= a + b fails)"
                .to_owned()
        }
        Dominance::NonPositiveGap { t, gap } => format!(
            "dominance not certified (gap {} at t = {})",
            text(gap),
            text(t)
        ),
    };
    let _ = writeln!(s, "{verdict}; minimum welfare gap: {min_gap}");
    s
}

pub fn verification_text(report: &VerificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "seed: {}", report.seed);
    for c in &report.checks {
        let status = match c.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "SKIP",
        };
        let measured: Vec<String> = c
            .measured
            .iter()
            .map(|m| format!("{}={}", m.label, text(m.value)))
            .collect();
        let _ = writeln!(
            s,
            "{status} {} [{}] tol={} {} ({})",
            c.name,
            c.claim,
            text(c.tolerance),
            measured.join(" "),
            c.detail
        );
    }
    let _ = writeln!(s, "worked-example audit (informational):");
    for f in &report.audit.findings {
        let quoted = f.quoted.map(text).unwrap_or_else(|| "-".to_owned());
        let mark = if f.consistent {
            "consistent"
        } else {
            "INCONSISTENT"
        };
        let _ = writeln!(
            s,
            "  {mark} {}: quoted={} measured={} ({})",
            f.name,
            quoted,
            text(f.measured),
            f.note
        );
    }
    let verdict = if report.passed() {
        "all checks passed"
    } else {
        "verification FAILED"
    };
    let _ = writeln!(s, "{verdict}");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig(0.5, 12), "0.5");
        assert_eq!(sig(0.635966126629852, 12), "0.63596612663");
        assert_eq!(sig(7.0, 6), "7");
        assert_eq!(sig(1234567.0, 6), "1.23457e6");
        assert_eq!(sig(1e-13, 12), "1e-13");
        assert_eq!(sig(-0.0001234, 6), "-0.0001234");
        assert_eq!(sig(0.0, 12), "0");
        assert_eq!(sig(100.0, 3), "100");
        assert_eq!(sig(f64::NAN, 3), "nan");
    }

    #[test]
    fn rounding_carries_into_exponent() {
        assert_eq!(sig(9.9999999, 3), "10");
        assert_eq!(sig(0.000099999, 2), "0.0001");
    }
}
