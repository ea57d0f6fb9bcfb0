use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Num;

/// Field elements the linear algebra and tensor code is generic over.
///
/// Zero tests are exact (`is_zero`), so only exact types give meaningful
/// ranks; `f64` is supported for inputs that are exactly representable.
pub trait Scalar:
    Num + Neg<Output = Self> + Clone + PartialEq + Debug + Display + Send + Sync + 'static
{
    fn from_i64(value: i64) -> Self;
}

impl Scalar for BigRational {
    fn from_i64(value: i64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }
}

impl Scalar for Ratio<i64> {
    fn from_i64(value: i64) -> Self {
        Ratio::from_integer(value)
    }
}

impl Scalar for f64 {
    fn from_i64(value: i64) -> Self {
        value as f64
    }
}
