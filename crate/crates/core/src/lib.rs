pub mod cli;
pub mod error;
pub mod extremal;
pub mod lab;
pub mod linalg;
pub mod muntz;
pub mod poly;
pub mod real;
pub mod report;
