pub mod certifier;
pub mod cli;
pub mod gram;
pub mod io;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod quotient;
pub mod sdp;
pub mod variety;
pub mod verify;

pub type Rational = num_rational::BigRational;
