use crate::{AnalysisError, Result};

/// Least-squares fit of `ln y = ln a + b ln x`; returns `(a, b)`.
pub fn fit_power_law(data: &[(f64, f64)]) -> Result<(f64, f64)> {
    if data.len() < 3 {
        return Err(AnalysisError::DegenerateFit(format!("need at least 3 points, got {}", data.len())));
    }
    if let Some(p) = data.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(AnalysisError::DegenerateFit(format!("non-positive point ({}, {})", p.0, p.1)));
    }
    let k = data.len() as f64;
    let xs: Vec<f64> = data.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = data.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= f64::EPSILON * mx.abs().max(1.0) {
        return Err(AnalysisError::DegenerateFit("all abscissae coincide".into()));
    }
    let b = sxy / sxx;
    Ok(((my - b * mx).exp(), b))
}

/// First two numeric columns of each non-comment line.
pub fn parse_pairs(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace().map(str::parse::<f64>);
        match (it.next(), it.next()) {
            (Some(Ok(x)), Some(Ok(y))) => out.push((x, y)),
            _ => return Err(AnalysisError::MissingData(format!("line {}: expected two numbers", i + 1))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_model_recovered() {
        let data: Vec<(f64, f64)> = [20.0, 40.0, 60.0, 80.0, 100.0, 120.0]
            .iter()
            .map(|&n: &f64| (n, 0.153 * n.powf(-1.74)))
            .collect();
        let (a, b) = fit_power_law(&data).unwrap();
        assert!((a - 0.153).abs() < 1e-13, "{a}");
        assert!((b + 1.74).abs() < 1e-13, "{b}");
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(fit_power_law(&[(20.0, 1.0), (20.0, 2.0)]), Err(AnalysisError::DegenerateFit(_))));
        assert!(matches!(
            fit_power_law(&[(20.0, 1.0), (20.0, 2.0), (20.0, 3.0)]),
            Err(AnalysisError::DegenerateFit(_))
        ));
        assert!(fit_power_law(&[(20.0, 1.0), (30.0, -2.0), (40.0, 3.0)]).is_err());
    }

    #[test]
    fn pairs() {
        let p = parse_pairs("# N lambda\n20 8e-4 x\n\n40 2e-4\n").unwrap();
        assert_eq!(p, vec![(20.0, 8e-4), (40.0, 2e-4)]);
        assert!(parse_pairs("20\n").is_err());
    }
}
