pub mod bench;
pub mod compare;
pub mod detect;
pub mod eval;
pub mod render;
pub mod synth;
