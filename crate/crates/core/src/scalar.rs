//! Scalar abstractions.
//!
//! Statistics that only need field arithmetic (`+ - * /`) are written against
//! [`Field`], so they run on `f32`, `f64` and exact [`num_rational::Ratio`]
//! values alike. Anything that needs `sqrt`, `log10` or infinities is written
//! against [`Real`].

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, Num, NumAssign};

pub trait Field: Num + Copy + FromPrimitive + PartialOrd + Debug + Send + Sync + 'static {
    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("integer not representable in scalar type")
    }
}

impl<T> Field for T where T: Num + Copy + FromPrimitive + PartialOrd + Debug + Send + Sync + 'static
{}

pub trait Real: Field + Float + NumAssign + Display + Default {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn mean<T: Field>(xs: &[usize]) -> T {
        let sum = xs
            .iter()
            .fold(T::zero(), |acc, &x| acc + T::from_usize_exact(x));
        sum / T::from_usize_exact(xs.len())
    }

    #[test]
    fn field_covers_floats_and_rationals() {
        assert_eq!(mean::<f64>(&[1, 2]), 1.5);
        assert_eq!(mean::<f32>(&[1, 2]), 1.5);
        assert_eq!(mean::<Ratio<i64>>(&[1, 2]), Ratio::new(3, 2));
    }
}
