pub mod factor;
pub mod gauss;
pub mod parse;
pub mod poly;
pub mod qh;
pub mod rat;

pub use gauss::GaussRat;
pub use poly::{Coeff, GaussPoly, Monomial, Poly, Poly2};
pub use qh::{qh_basis, qh_components, QHPoly, QHType};
pub use rat::{int, rat, Rat};
