pub mod checker;
pub mod contracts;
pub mod models;
pub mod pml;
pub mod props;
pub mod report;
pub mod ta;
