/// Fixed 8-decimal rendering with trailing zeros trimmed, keeping one decimal digit.
pub fn num(x: f64) -> String {
    let s = format!("{x:.8}");
    let s = s.trim_end_matches('0');
    let s = if s.ends_with('.') {
        format!("{s}0")
    } else {
        s.to_string()
    };
    if s == "-0.0" {
        "0.0".into()
    } else {
        s
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "-".into())
}

/// `0|12` style label for a cut; commas separate indices once any exceeds 9.
pub fn cut_label(subset: &[usize], n: usize) -> String {
    let rest: Vec<usize> = (0..n).filter(|k| !subset.contains(k)).collect();
    let sep = if n > 10 { "," } else { "" };
    let join = |v: &[usize]| {
        v.iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(sep)
    };
    format!("{}|{}", join(subset), join(&rest))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_trailing_zeros() {
        assert_eq!(num(std::f64::consts::FRAC_1_SQRT_2), "0.70710678");
        assert_eq!(num(1.0), "1.0");
        assert_eq!(num(0.2), "0.2");
        assert_eq!(num(-1e-12), "0.0");
        assert_eq!(cut_label(&[0], 3), "0|12");
    }
}
