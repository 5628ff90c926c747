pub mod figure;
pub mod query;
pub mod simulate;
pub mod validate;
