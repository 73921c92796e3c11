use anyhow::Result;
use clap::ValueEnum;
use netdoe::SearchReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

const FIELDS: [&str; 10] = [
    "best_design",
    "best_value",
    "num_eval",
    "num_considered",
    "num_skipped_noncanonical",
    "num_invalid",
    "wall_time",
    "seed",
    "efficiency",
    "partial",
];

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(String::new, T::to_string)
}

fn row(report: &SearchReport) -> [String; 10] {
    [
        opt(&report.best_design),
        opt(&report.best_value),
        report.num_eval.to_string(),
        report.num_considered.to_string(),
        report.num_skipped_noncanonical.to_string(),
        report.num_invalid.to_string(),
        report.wall_time.to_string(),
        report.seed.to_string(),
        opt(&report.efficiency),
        report.partial.to_string(),
    ]
}

pub fn render(report: &SearchReport, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(FIELDS)?;
            w.write_record(row(report))?;
            String::from_utf8(w.into_inner()?)?
        }
        Format::Text => {
            let values = row(report);
            let mut out = String::new();
            for (name, value) in FIELDS.iter().zip(values) {
                let value = if value.is_empty() { "-".to_string() } else { value };
                out.push_str(&format!("{name:<26}{value}\n"));
            }
            out
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use netdoe::Design;

    fn sample() -> SearchReport {
        SearchReport {
            best_design: Design::from_letters("ABBA"),
            best_value: Some(0.5),
            num_eval: 3,
            num_considered: 8,
            num_skipped_noncanonical: 4,
            num_invalid: 1,
            wall_time: 0.25,
            seed: 7,
            efficiency: None,
            partial: false,
        }
    }

    #[test]
    fn csv_has_header_and_row() {
        let text = render(&sample(), Format::Csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("best_design,best_value,num_eval"));
        assert_eq!(lines[1], "ABBA,0.5,3,8,4,1,0.25,7,,false");
    }

    #[test]
    fn text_marks_missing_values() {
        let text = render(&sample(), Format::Text).unwrap();
        assert!(text.contains("efficiency                -"));
        assert!(text.contains("best_design               ABBA"));
    }
}
