pub mod budget;
pub mod distill;
pub mod figure;
pub mod malt;
pub mod state;
