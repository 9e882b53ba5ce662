pub mod algebra;
pub mod certificate;
pub mod cli;
pub mod descent;
pub mod laurent;
pub mod ratint;
pub mod riccati;
pub mod tower;
pub mod weierstrass;
