pub mod arith;
pub mod autorders;
pub mod cyclotomic;
pub mod degeneration;
pub mod dualcomplex;
pub mod elliptic;
mod json;
pub mod lattice;
mod linalg;
pub mod sncfiber;
