//! Numbers extended by a single point at infinity.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A finite value or `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ext<T> {
    Finite(T),
    Infinity,
}

pub type ExtReal = Ext<f64>;
pub type ExtComplex = Ext<Complex64>;

impl<T: Copy> Ext<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Ext::Finite(v) => Some(v),
            Ext::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Ext::Infinity)
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        if v.is_infinite() {
            Ext::Infinity
        } else {
            Ext::Finite(v)
        }
    }
}

impl From<ExtReal> for ExtComplex {
    fn from(v: ExtReal) -> Self {
        match v {
            Ext::Finite(x) => Ext::Finite(Complex64::new(x, 0.0)),
            Ext::Infinity => Ext::Infinity,
        }
    }
}

impl ExtReal {
    /// Plain `f64` view with `∞` mapped to `+inf`.
    pub fn to_f64(self) -> f64 {
        match self {
            Ext::Finite(v) => v,
            Ext::Infinity => f64::INFINITY,
        }
    }
}

impl<T: fmt::Display> fmt::Display for Ext<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Finite(v) => v.fmt(f),
            Ext::Infinity => f.write_str("inf"),
        }
    }
}
