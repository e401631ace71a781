pub mod checks;
pub mod constructions;
pub mod domain;
pub mod filter;
pub mod game;
pub mod gen;
pub mod rank;
pub mod reference;
pub mod set;
