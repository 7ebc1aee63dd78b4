//! Cellwise material coefficients: shear modulus, first Lamé parameter, and
//! the characteristic length that scales the couple-stress term.
//!
//! The Lamé parameter may be `f64::INFINITY` to express exact
//! incompressibility; code paths that need its reciprocal go through
//! [`MaterialField::inv_lambda`], which maps that case to zero.

use nalgebra as na;
use thiserror::Error;

use crate::mesh::{Mesh, MeshGeometry};

pub type Point2 = na::Point2<f64>;

#[derive(Debug, Error)]
pub enum MaterialError {
    #[error("cell {cell}: {name} = {value} is not admissible ({requirement})")]
    InvalidValue { cell: usize, name: &'static str, value: f64, requirement: &'static str },
}

/// One coefficient value per cell.
#[derive(Clone, Debug)]
pub struct MaterialField {
    pub mu: Vec<f64>,
    pub lambda: Vec<f64>,
    pub ell: Vec<f64>,
}

impl MaterialField {
    /// Sample coefficient functions of (cell centroid, region tag).
    pub fn sample(
        mesh: &Mesh,
        geo: &MeshGeometry,
        mu: impl Fn(Point2, i32) -> f64,
        lambda: impl Fn(Point2, i32) -> f64,
        ell: impl Fn(Point2, i32) -> f64,
    ) -> Result<Self, MaterialError> {
        let n = mesh.n_cells();
        let mut field = MaterialField {
            mu: Vec::with_capacity(n),
            lambda: Vec::with_capacity(n),
            ell: Vec::with_capacity(n),
        };
        for c in 0..n {
            let (x, tag) = (geo.cell_centroid[c], mesh.region_tags[c]);
            field.mu.push(mu(x, tag));
            field.lambda.push(lambda(x, tag));
            field.ell.push(ell(x, tag));
        }
        field.validate()?;
        Ok(field)
    }

    /// The same coefficients in every cell.
    pub fn uniform(n_cells: usize, mu: f64, lambda: f64, ell: f64) -> Result<Self, MaterialError> {
        let field = MaterialField {
            mu: vec![mu; n_cells],
            lambda: vec![lambda; n_cells],
            ell: vec![ell; n_cells],
        };
        field.validate()?;
        Ok(field)
    }

    /// `1 / lambda`, with exact incompressibility mapped to zero.
    pub fn inv_lambda(&self, cell: usize) -> f64 {
        let lambda = self.lambda[cell];
        if lambda.is_infinite() {
            0.0
        } else {
            1.0 / lambda
        }
    }

    pub fn n_cells(&self) -> usize {
        self.mu.len()
    }

    fn validate(&self) -> Result<(), MaterialError> {
        for c in 0..self.n_cells() {
            if !(self.mu[c].is_finite() && self.mu[c] > 0.0) {
                return Err(MaterialError::InvalidValue {
                    cell: c,
                    name: "mu",
                    value: self.mu[c],
                    requirement: "finite and positive",
                });
            }
            if !(self.lambda[c] > 0.0) {
                return Err(MaterialError::InvalidValue {
                    cell: c,
                    name: "lambda",
                    value: self.lambda[c],
                    requirement: "positive, possibly infinite",
                });
            }
            if !(self.ell[c].is_finite() && self.ell[c] >= 0.0) {
                return Err(MaterialError::InvalidValue {
                    cell: c,
                    name: "ell",
                    value: self.ell[c],
                    requirement: "finite and nonnegative",
                });
            }
        }
        Ok(())
    }
}
