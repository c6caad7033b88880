use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the solver is generic over (`f32` or `f64`).
///
/// The associated tolerances scale the internal zero tests of the simplex and
/// the graph kernels to the precision of the type.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Smallest magnitude accepted as a simplex pivot.
    const PIVOT_TOL: f64;
    /// Primal and dual feasibility threshold inside the simplex.
    const FEAS_TOL: f64;
    /// Relative slack allowed when checking heuristic consistency.
    const CONSISTENCY_TOL: f64;

    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("scalar conversion from f64")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar conversion to f64")
    }
}

impl Scalar for f64 {
    const PIVOT_TOL: f64 = 1e-9;
    const FEAS_TOL: f64 = 1e-9;
    const CONSISTENCY_TOL: f64 = 1e-12;
}

impl Scalar for f32 {
    const PIVOT_TOL: f64 = 1e-5;
    const FEAS_TOL: f64 = 1e-5;
    const CONSISTENCY_TOL: f64 = 1e-5;
}
