//! Locale-independent number output: values are rounded to 15 significant
//! digits and then printed in shortest round-trip form.

pub fn round15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        // folds -0.0 into 0.0
        return x + 0.0;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

pub fn fmt15(x: f64) -> String {
    let r = round15(x);
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{r}")
    }
}
