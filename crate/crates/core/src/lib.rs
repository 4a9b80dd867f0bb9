pub mod alternatives;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod kdeform;
pub mod numerics;
pub mod oscillator;
pub mod realization;
pub mod report;
pub mod sampling;
pub mod structures;
