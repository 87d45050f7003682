use super::fit::PowerLawModel;
use crate::data::LabelKind;

pub fn label_symbol(label: LabelKind) -> &'static str {
    match label {
        LabelKind::Ys => "YS",
        LabelKind::Uts => "UTS",
        LabelKind::EMod => "E",
        LabelKind::Elongation => "Elongation",
        LabelKind::Hv => "HV",
        LabelKind::Hrc => "HRC",
        LabelKind::Rz => "Rz",
    }
}

/// `(mantissa, exponent)` with the exponent a multiple of 3 and 0.1 ≤ |mantissa| < 100.
pub fn engineering(v: f64) -> (f64, i32) {
    if v == 0.0 || !v.is_finite() {
        return (v, 0);
    }
    let mut e = 3 * ((v.abs().log10() + 1.0) / 3.0).floor() as i32;
    let mut m = v / 10f64.powi(e);
    // guard rounding at the band edges
    if m.abs() >= 100.0 {
        e += 3;
        m /= 1000.0;
    } else if m.abs() < 0.1 {
        e -= 3;
        m *= 1000.0;
    }
    (m, e)
}

fn two(v: f64) -> String {
    let r = (v * 100.0).round() / 100.0;
    let s = format!("{:.2}", if r == 0.0 { 0.0 } else { r });
    s
}

/// `YS = 0.83 × 10^6 × P^0.07 V^-0.05 ...`
pub fn render_equation(m: &PowerLawModel) -> String {
    let (mant, exp) = engineering(m.w0);
    let mult = if exp == 0 { two(mant) } else { format!("{} × 10^{}", two(mant), exp) };
    let terms: Vec<String> = m.symbols.iter().zip(&m.w).map(|(s, w)| format!("{s}^{}", two(*w))).collect();
    format!("{} = {} × {}", label_symbol(m.label), mult, terms.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn engineering_bands() {
        let (m, e) = engineering(0.83e6);
        assert!((m - 0.83).abs() < 1e-12 && e == 6);
        assert_eq!(engineering(7.18), (7.18, 0));
        let (m, e) = engineering(97_000.0);
        assert!((m - 97.0).abs() < 1e-9 && e == 3);
        let (m, e) = engineering(0.05);
        assert!((m - 50.0).abs() < 1e-9 && e == -3);
    }
}
