use serde::{Deserialize, Serialize};

use crate::data::LabelKind;

/// Fit quality of an identified equation next to the best learner on the same task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct R2Comparison {
    pub label: LabelKind,
    pub equation_r2: f64,
    pub ml_r2: f64,
}

impl R2Comparison {
    /// `ml_r2 − equation_r2`
    pub fn gap(&self) -> f64 {
        self.ml_r2 - self.equation_r2
    }

    /// The learner fits at least as well as the equation.
    pub fn ml_ahead(&self) -> bool {
        self.equation_r2 <= self.ml_r2
    }

    pub fn within(&self, tol: f64) -> bool {
        self.gap().abs() <= tol
    }
}

/// Published equation and learner R² for yield strength, tensile strength and modulus.
pub const REFERENCE_COMPARISON: [R2Comparison; 3] = [
    R2Comparison { label: LabelKind::Ys, equation_r2: 0.91, ml_r2: 0.958 },
    R2Comparison { label: LabelKind::Uts, equation_r2: 0.853, ml_r2: 0.9694 },
    R2Comparison { label: LabelKind::EMod, equation_r2: 0.848, ml_r2: 0.9427 },
];
