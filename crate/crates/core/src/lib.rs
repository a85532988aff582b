pub mod cremona;
pub mod error;
pub mod field;
pub mod gcd;
pub mod monomial;
pub mod poly;
pub mod ratfunc;
pub mod resultant;
pub mod screen;
pub mod subst;
pub mod textio;
pub mod towers;

pub use cremona::{CremonaMap, MonomialProfile};
pub use error::{Error, Result};
pub use field::{Coeff, Field};
pub use monomial::Monomial;
pub use poly::{Polynomial, Ring};
pub use ratfunc::RationalFunction;
pub use subst::Substitution;
