//! The results table and its CSV form.

use std::io::{Read, Write};

use onlinefwer::simulation::MetricsRow;
use onlinefwer::ProcedureId;

pub const HEADER: [&str; 13] = [
    "procedure",
    "batch_size",
    "pi_A",
    "mu_A",
    "mu_N",
    "rho",
    "n",
    "trials",
    "seed",
    "power",
    "power_se",
    "fwer",
    "fwer_se",
];

/// One (procedure, scenario) result.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub procedure: ProcedureId,
    pub batch_size: usize,
    pub pi_a: f64,
    pub mu_a: f64,
    pub mu_n: f64,
    pub rho: f64,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub power: f64,
    pub power_se: f64,
    pub fwer: f64,
    pub fwer_se: f64,
}

impl ResultRow {
    pub fn with_metrics(mut self, metrics: &MetricsRow) -> Self {
        self.procedure = metrics.procedure;
        self.power = metrics.power;
        self.power_se = metrics.power_se;
        self.fwer = metrics.fwer;
        self.fwer_se = metrics.fwer_se;
        self
    }

    pub fn record(&self) -> [String; 13] {
        [
            self.procedure.name().to_string(),
            self.batch_size.to_string(),
            format_sig(self.pi_a),
            format_sig(self.mu_a),
            format_sig(self.mu_n),
            format_sig(self.rho),
            self.n.to_string(),
            self.trials.to_string(),
            self.seed.to_string(),
            format_sig(self.power),
            format_sig(self.power_se),
            format_sig(self.fwer),
            format_sig(self.fwer_se),
        ]
    }

    fn from_record(record: &csv::StringRecord) -> Result<Self, String> {
        if record.len() != HEADER.len() {
            return Err(format!(
                "expected {} fields, found {}",
                HEADER.len(),
                record.len()
            ));
        }
        let f = |k: usize| -> Result<f64, String> {
            record[k].parse().map_err(|e| format!("{}: {e}", HEADER[k]))
        };
        let u = |k: usize| -> Result<u64, String> {
            record[k].parse().map_err(|e| format!("{}: {e}", HEADER[k]))
        };
        Ok(Self {
            procedure: record[0].parse().map_err(|e| format!("procedure: {e}"))?,
            batch_size: u(1)? as usize,
            pi_a: f(2)?,
            mu_a: f(3)?,
            mu_n: f(4)?,
            rho: f(5)?,
            n: u(6)? as usize,
            trials: u(7)? as usize,
            seed: u(8)?,
            power: f(9)?,
            power_se: f(10)?,
            fwer: f(11)?,
            fwer_se: f(12)?,
        })
    }
}

/// Procedure name, then batch size, `π_A` and `μ_N`.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        a.procedure
            .name()
            .cmp(b.procedure.name())
            .then(a.batch_size.cmp(&b.batch_size))
            .then(a.pi_a.total_cmp(&b.pi_a))
            .then(a.mu_n.total_cmp(&b.mu_n))
    });
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(HEADER)?;
    for row in rows {
        writer.write_record(row.record())?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ResultRow>, String> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers().map_err(|e| e.to_string())?;
    if header.iter().ne(HEADER) {
        return Err(format!(
            "unexpected header: {}",
            header.iter().collect::<Vec<_>>().join(",")
        ));
    }
    reader
        .records()
        .enumerate()
        .map(|(k, record)| {
            let record = record.map_err(|e| e.to_string())?;
            ResultRow::from_record(&record).map_err(|e| format!("row {}: {e}", k + 1))
        })
        .collect()
}

/// Six significant digits, trailing zeros dropped; plain notation for
/// exponents in `[-5, 6)`, scientific otherwise.
pub fn format_sig(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.2), "0.2");
        assert_eq!(format_sig(0.123456789), "0.123457");
        assert_eq!(format_sig(9.9999996), "10");
        assert_eq!(format_sig(-2.0), "-2");
        assert_eq!(format_sig(-0.0), "0");
        assert_eq!(format_sig(1234567.0), "1.23457e6");
        assert_eq!(format_sig(0.00013), "0.00013");
        assert_eq!(format_sig(1.5e-7), "1.5e-7");
        assert_eq!(format_sig(f64::NAN), "NaN");
    }

    proptest! {
        #[test]
        fn formatting_is_stable_under_reparse(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL) {
            let s = format_sig(x);
            let y: f64 = s.parse().unwrap();
            prop_assert_eq!(format_sig(y), s);
            prop_assert!(((y - x) / x).abs() <= 5e-6);
        }
    }
}
