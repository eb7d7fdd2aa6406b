pub mod analysis;
pub mod bridge;
pub mod engine;
pub mod exec;
pub mod model;
pub mod syntax;
pub mod repair;
pub mod query;
pub mod synth;
