//! Measurement-theoretic classification of information retrieval evaluation
//! measures: evaluate measures on finite domains, induce the weak order and
//! distance they define, and decide which scale category they realise.

pub mod cli;
pub mod enumeration;
pub mod error;
pub mod ingest;
pub mod intrinsic;
pub mod measures;
pub mod model;
pub mod report;
pub mod value;

pub use enumeration::DomainSpec;
pub use error::{Error, Result};
pub use intrinsic::{classify, Category, ClassifyOptions, Verdict};
pub use measures::MeasureSpec;
pub use model::{ContingencyTable, Element, GradeScheme, Ranking, Universe, UserContext};
pub use value::Value;
