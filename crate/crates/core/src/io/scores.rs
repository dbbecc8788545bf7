use super::FormatError;

/// One score per line; blank lines and `#` comments are skipped.
pub fn read_scores(text: &str) -> Result<Vec<f64>, FormatError> {
    let mut scores = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        match t.parse::<f64>() {
            Ok(v) if v.is_finite() => scores.push(v),
            _ => {
                return Err(FormatError::BadNumber {
                    line: i + 1,
                    field: 1,
                    text: t.to_owned(),
                })
            }
        }
    }
    if scores.is_empty() {
        return Err(FormatError::NoRows);
    }
    Ok(scores)
}

pub fn write_scores(scores: &[f64]) -> String {
    scores.iter().map(|s| format!("{s}\n")).collect()
}
