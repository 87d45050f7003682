use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::data::{LabelKind, NumericField, ThermalProperty};
use crate::error::{validation, Result};
use crate::linalg::Mat;

pub type Rational = Ratio<i64>;

pub const BASE_UNITS: [&str; 4] = ["kg", "m", "s", "K"];

/// Exponents of (kg, m, s, K).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct DimensionVector(pub [Rational; 4]);

impl DimensionVector {
    pub const fn ints(kg: i64, m: i64, s: i64, k: i64) -> Self {
        DimensionVector([Ratio::new_raw(kg, 1), Ratio::new_raw(m, 1), Ratio::new_raw(s, 1), Ratio::new_raw(k, 1)])
    }

    pub const PASCAL: DimensionVector = DimensionVector::ints(1, -1, -2, 0);
    pub const DIMENSIONLESS: DimensionVector = DimensionVector::ints(0, 0, 0, 0);

    pub fn is_dimensionless(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn as_f64(&self) -> [f64; 4] {
        self.0.map(|r| r.to_f64().expect("small rational"))
    }

    /// Dimension of `x^p`.
    pub fn pow(self, p: Rational) -> Self {
        DimensionVector(self.0.map(|r| r * p))
    }
}

impl Add for DimensionVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        DimensionVector(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for DimensionVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + -o
    }
}

impl Neg for DimensionVector {
    type Output = Self;
    fn neg(self) -> Self {
        DimensionVector(self.0.map(|r| -r))
    }
}

impl Mul<Rational> for DimensionVector {
    type Output = Self;
    fn mul(self, p: Rational) -> Self {
        self.pow(p)
    }
}

impl fmt::Display for DimensionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = BASE_UNITS
            .iter()
            .zip(self.0)
            .filter(|(_, e)| !e.is_zero())
            .map(|(u, e)| if e == Ratio::from_integer(1) { u.to_string() } else { format!("{u}^{e}") })
            .collect();
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

/// Where a quantity's value comes from in a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "from", content = "field", rename_all = "snake_case")]
pub enum QuantitySource {
    Process(NumericField),
    Material(ThermalProperty),
    /// melting point minus the reference temperature
    MeltingDelta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub symbol: String,
    pub name: String,
    /// SI unit as written in equations
    pub unit: String,
    pub dim: DimensionVector,
    /// multiplies a dataset value to give SI
    pub si_factor: f64,
    pub source: QuantitySource,
}

/// Ordered power-law inputs with their dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantityTable {
    pub quantities: Vec<Quantity>,
    /// reference temperature subtracted from the melting point, °C
    pub t0: f64,
}

impl QuantityTable {
    /// P, V, L, B, ρ, C_p, CTE, k, T_m − T_0 in that order.
    pub fn standard(t0: f64) -> Self {
        use NumericField::*;
        use QuantitySource::*;
        use ThermalProperty::*;
        let q = |symbol: &str, name: &str, unit: &str, dim, si_factor, source| Quantity {
            symbol: symbol.into(),
            name: name.into(),
            unit: unit.into(),
            dim,
            si_factor,
            source,
        };
        QuantityTable {
            quantities: vec![
                q("P", "beam power", "W", DimensionVector::ints(1, 2, -3, 0), 1.0, Process(BeamPower)),
                q("V", "scanning speed", "m/s", DimensionVector::ints(0, 1, -1, 0), 1e-3, Process(ScanSpeed)),
                q("L", "layer thickness", "m", DimensionVector::ints(0, 1, 0, 0), 1e-6, Process(LayerThickness)),
                q("B", "beam diameter", "m", DimensionVector::ints(0, 1, 0, 0), 1e-6, Process(BeamDiameter)),
                q("rho", "density", "kg/m^3", DimensionVector::ints(1, -3, 0, 0), 1e3, Material(Density)),
                q("C_p", "specific heat", "m^2/(s^2 K)", DimensionVector::ints(0, 2, -2, -1), 1.0, Material(SpecificHeat)),
                q("CTE", "thermal expansion coefficient", "1/K", DimensionVector::ints(0, 0, 0, -1), 1e-6, Material(Cte)),
                q("k", "thermal conductivity", "kg m/(s^3 K)", DimensionVector::ints(1, 1, -3, -1), 1.0, Material(ThermalConductivity)),
                q("(T_m - T_0)", "melting point above reference", "K", DimensionVector::ints(0, 0, 0, 1), 1.0, MeltingDelta),
            ],
            t0,
        }
    }

    pub fn len(&self) -> usize {
        self.quantities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quantities.is_empty()
    }

    pub fn symbols(&self) -> Vec<String> {
        self.quantities.iter().map(|q| q.symbol.clone()).collect()
    }

    /// Dimension of `Π xᵢ^{wᵢ}` for float exponents.
    pub fn product_dimension(&self, w: &[f64]) -> [f64; 4] {
        let mut d = [0.0; 4];
        for (q, &wi) in self.quantities.iter().zip(w) {
            for (u, e) in q.dim.as_f64().iter().enumerate() {
                d[u] += wi * e;
            }
        }
        d
    }
}

/// SI target dimension and dataset-to-SI factor of a label, where one exists.
pub fn target_dimension(label: LabelKind) -> Result<(DimensionVector, f64)> {
    match label {
        LabelKind::Ys | LabelKind::Uts => Ok((DimensionVector::PASCAL, 1e6)),
        LabelKind::EMod => Ok((DimensionVector::PASCAL, 1e9)),
        other => Err(validation!("{other} has no dimensional power-law form")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintForm {
    /// one row per base unit from the quantity dimensions
    Derived,
    /// as derived, but with the temperature row's specific-heat sign flipped
    Printed,
}

/// Linear equalities `A w = b`, one row per base unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub a: Mat<f64>,
    pub b: Vec<f64>,
    pub form: ConstraintForm,
}

impl ConstraintSet {
    /// `A w − b`, in base-unit order.
    pub fn residuals(&self, w: &[f64]) -> Vec<f64> {
        assert_eq!(w.len(), self.a.cols, "exponent vector length");
        (0..self.a.rows)
            .map(|r| self.a.row(r).iter().zip(w).map(|(a, x)| a * x).sum::<f64>() - self.b[r])
            .collect()
    }

    pub fn max_residual(&self, w: &[f64]) -> f64 {
        self.residuals(w).iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// `Σᵢ wᵢ·dimᵢ[u] = target[u]` for each base unit `u`.
pub fn derive_constraints(table: &QuantityTable, target: DimensionVector) -> ConstraintSet {
    let n = table.len();
    let mut a = Mat::zeros(4, n);
    for (j, q) in table.quantities.iter().enumerate() {
        for (u, e) in q.dim.as_f64().into_iter().enumerate() {
            a[(u, j)] = e;
        }
    }
    ConstraintSet { a, b: target.as_f64().to_vec(), form: ConstraintForm::Derived }
}

/// The derived set with the sign of the specific-heat term in the temperature row flipped.
pub fn printed_constraints(table: &QuantityTable, target: DimensionVector) -> ConstraintSet {
    let mut c = derive_constraints(table, target);
    if let Some(j) = table.quantities.iter().position(|q| q.source == QuantitySource::Material(ThermalProperty::SpecificHeat)) {
        c.a[(3, j)] = -c.a[(3, j)];
    }
    c.form = ConstraintForm::Printed;
    c
}

pub fn constraints(table: &QuantityTable, target: DimensionVector, form: ConstraintForm) -> ConstraintSet {
    match form {
        ConstraintForm::Derived => derive_constraints(table, target),
        ConstraintForm::Printed => printed_constraints(table, target),
    }
}
