pub mod abs_ppt;
pub mod experiment;
pub mod spectrum;
pub mod witness;
