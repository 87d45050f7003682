//! Dimensionally constrained power laws `y = w₀ Π xᵢ^{wᵢ}`.

mod compare;
mod dims;
mod fit;
mod format;

pub use compare::{R2Comparison, REFERENCE_COMPARISON};
pub use dims::{
    constraints, derive_constraints, printed_constraints, target_dimension, ConstraintForm, ConstraintSet,
    DimensionVector, Quantity, QuantitySource, QuantityTable, Rational, BASE_UNITS,
};
pub use fit::{
    evaluate_powerlaw, fit_loglinear, fit_loglinear_unconstrained, fit_powerlaw, powerlaw_r2, LogLinearFit,
    PowerLawData, PowerLawModel, PowerLawOptions, RecordFilter,
};
pub use format::{engineering, label_symbol, render_equation};

/// Reference temperature subtracted from the melting point, °C.
pub const DEFAULT_T0: f64 = 25.0;

/// Exponents reported for as-built yield strength, in table order.
pub const AS_BUILT_YS_EXPONENTS: [f64; 9] = [0.07, -0.05, -0.18, -0.08, 0.82, 0.75, -0.94, 0.11, -0.29];
pub const AS_BUILT_YS_MULTIPLIER: f64 = 0.83e6;

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal() -> ConstraintSet {
        derive_constraints(&QuantityTable::standard(DEFAULT_T0), DimensionVector::PASCAL)
    }

    #[test]
    fn constraint_rows_match_the_dimension_table() {
        let c = pascal();
        let rows: Vec<Vec<f64>> = (0..4).map(|r| c.a.row(r).to_vec()).collect();
        assert_eq!(rows[0], vec![1., 0., 0., 0., 1., 0., 0., 1., 0.]);
        assert_eq!(rows[1], vec![2., 1., 1., 1., -3., 2., 0., 1., 0.]);
        assert_eq!(rows[2], vec![-3., -1., 0., 0., 0., -2., 0., -3., 0.]);
        assert_eq!(rows[3], vec![0., 0., 0., 0., 0., -1., -1., -1., 1.]);
        assert_eq!(c.b, vec![1., -1., -2., 0.]);
    }

    #[test]
    fn pressure_combination_is_consistent() {
        let w = [0., 0., 0., 0., 1., 1., 0., 0., 1.];
        assert!(pascal().residuals(&w).iter().all(|r| *r == 0.0));
        let p = [1., 0., 0., 0., 0., 0., 0., 0., 0.];
        assert_eq!(pascal().residuals(&p), vec![0.0, 3.0, -1.0, 0.0]);
    }

    #[test]
    fn printed_form_flips_the_specific_heat_sign() {
        let c = printed_constraints(&QuantityTable::standard(DEFAULT_T0), DimensionVector::PASCAL);
        assert_eq!(c.a.row(3), &[0., 0., 0., 0., 0., 1., -1., -1., 1.]);
    }

    #[test]
    fn dimension_arithmetic_is_exact() {
        let rho = DimensionVector::ints(1, -3, 0, 0);
        let cp = DimensionVector::ints(0, 2, -2, -1);
        let dt = DimensionVector::ints(0, 0, 0, 1);
        assert_eq!(rho + cp + dt, DimensionVector::PASCAL);
        let half = Rational::new(1, 2);
        assert_eq!((rho * half).0[0], half);
        assert_eq!(DimensionVector::PASCAL.to_string(), "kg m^-1 s^-2");
    }
}
