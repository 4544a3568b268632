use crate::error::Result;
use crate::exact::{Irrational, Rational};
use crate::linalg::Matrix;
use crate::melnikov::canonical::{ladder_inputs, reduce_ladder};
use crate::melnikov::{BasisTerm, Family, Ladder, Parity};

/// The free parameters of one ladder and how they relate to the inputs.
#[derive(Debug, Clone)]
pub struct LadderParams {
    pub family: Family,
    pub ladder: Ladder,
    /// Elements whose coefficients are the free parameters.
    pub elements: Vec<BasisTerm>,
    /// Input elements of the combination.
    pub inputs: Vec<BasisTerm>,
    /// Linear map inputs → free parameters (full row rank).
    pub map: Matrix,
    /// Half-exponents controlled by the free parameters.
    pub exponents: Vec<i64>,
    pub generator: Irrational,
}

impl LadderParams {
    pub fn new(family: Family, ladder: Ladder) -> Result<Self> {
        let inputs = ladder_inputs(family, &ladder);
        let (elements, map) = if ladder.n == 0 {
            // Degree zero: each block is a single integral with its own
            // leading power, so the block coefficients are already free.
            let half = family == Family::Piecewise && ladder.parity == Parity::Odd;
            let unit = if half { Rational::new(1.into(), 2.into()) } else { Rational::from_integer(1.into()) };
            let mut map = Matrix::identity(inputs.len());
            for k in 0..inputs.len() {
                map.set(k, k, unit.clone());
            }
            let elements = (0..ladder.blocks).map(|b| ladder.element(0, b)).collect();
            (elements, map)
        } else {
            let zeros = vec![Rational::from_integer(0.into()); inputs.len()];
            let canonical = reduce_ladder(family, ladder, zeros)?;
            let elements = canonical
                .head_elements()
                .into_iter()
                .chain(canonical.tail_elements())
                .collect();
            (elements, canonical.map)
        };
        let generator = match ladder.parity {
            Parity::Odd => Irrational::Pi,
            Parity::Even => Irrational::Sqrt2,
        };
        Ok(Self {
            family,
            ladder,
            elements,
            inputs,
            map,
            exponents: ladder.controlled_exponents(),
            generator,
        })
    }

    /// Rational part of the coefficient of `h^{e/2}` in an element.
    pub fn entry(&self, element: &BasisTerm, exponent: i64) -> Rational {
        element.coeff(exponent).part(self.generator).clone()
    }

    /// `∂B/∂(free parameters)`: rows are controlled exponents.
    pub fn jacobian(&self) -> Matrix {
        self.matrix_over(&self.elements, &self.exponents)
    }

    pub fn matrix_over(&self, elements: &[BasisTerm], exponents: &[i64]) -> Matrix {
        Matrix::from_rows(
            exponents
                .iter()
                .map(|&e| elements.iter().map(|el| self.entry(el, e)).collect())
                .collect(),
        )
    }
}
