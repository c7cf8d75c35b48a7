pub mod error;
pub mod scalar;
pub mod series;
pub mod multipoly;
pub mod parse;
pub mod roots;
pub mod puiseux;
pub mod classify;
pub mod constructors;
pub mod ideals;
pub mod verify;
pub mod cli;
