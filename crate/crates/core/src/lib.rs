pub mod classic;
pub mod cli;
pub mod error;
pub mod exactmath;
pub mod families;
pub mod oracle;
pub mod pipeline;
pub mod spectral;
