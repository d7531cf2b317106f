//! Classification of MA(2) coefficients against the closed invertibility
//! triangle `{-c1 - c2 <= 1, c1 - c2 <= 1, |c2| <= 1}`.
//!
//! Vertices: A = (-2, 1) (double root at +1), B = (0, -1) (roots +1 and -1),
//! C = (2, 1) (double root at -1). Edge AB carries a unit root at +1, edge BC a
//! root at -1 and edge AC a pair of complex roots on the unit circle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Segment {
    /// `-c1 - c2 = 1`: one reciprocal root equal to +1.
    Ab,
    /// `c1 - c2 = 1`: one reciprocal root equal to -1.
    Bc,
    /// `c2 = 1`: roots on the unit circle with product one.
    Ac,
}

impl Segment {
    pub const ALL: [Segment; 3] = [Segment::Ab, Segment::Bc, Segment::Ac];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionLabel {
    Interior,
    BoundaryAb,
    BoundaryBc,
    BoundaryAc,
    VertexA,
    VertexB,
    VertexC,
}

impl RegionLabel {
    /// Boundary segments the point lies on (two for a vertex).
    pub fn segments(self) -> &'static [Segment] {
        match self {
            RegionLabel::Interior => &[],
            RegionLabel::BoundaryAb => &[Segment::Ab],
            RegionLabel::BoundaryBc => &[Segment::Bc],
            RegionLabel::BoundaryAc => &[Segment::Ac],
            RegionLabel::VertexA => &[Segment::Ab, Segment::Ac],
            RegionLabel::VertexB => &[Segment::Ab, Segment::Bc],
            RegionLabel::VertexC => &[Segment::Bc, Segment::Ac],
        }
    }

    pub fn is_on(self, seg: Segment) -> bool {
        self.segments().contains(&seg)
    }
}

/// Sign of the discriminant `c1^2 - 4 c2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootKind {
    Real,
    Repeated,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub label: RegionLabel,
    pub roots: RootKind,
}

pub fn classify_region<T: Scalar>(c1: T, c2: T) -> Result<Region> {
    let tol = T::lit(BOUNDARY_TOL).max(T::epsilon() * T::lit(16.0));
    if !(c1.is_finite() && c2.is_finite()) {
        return Err(Error::Invalid("non-finite coefficient".into()));
    }
    let one = T::one();
    let d_ab = -c1 - c2 - one;
    let d_bc = c1 - c2 - one;
    let d_ac = c2 - one;
    if d_ab > tol || d_bc > tol || d_ac > tol {
        return Err(Error::OutsideRegion {
            c1: c1.to_f64_lossy(),
            c2: c2.to_f64_lossy(),
        });
    }
    let (ab, bc, ac) = (d_ab.abs() <= tol, d_bc.abs() <= tol, d_ac.abs() <= tol);
    let label = match (ab, bc, ac) {
        (true, true, _) => RegionLabel::VertexB,
        (true, false, true) => RegionLabel::VertexA,
        (false, true, true) => RegionLabel::VertexC,
        (true, false, false) => RegionLabel::BoundaryAb,
        (false, true, false) => RegionLabel::BoundaryBc,
        (false, false, true) => RegionLabel::BoundaryAc,
        (false, false, false) => RegionLabel::Interior,
    };
    let disc = c1 * c1 - T::lit(4.0) * c2;
    let roots = if disc.abs() <= tol {
        RootKind::Repeated
    } else if disc > T::zero() {
        RootKind::Real
    } else {
        RootKind::Complex
    };
    Ok(Region { label, roots })
}
