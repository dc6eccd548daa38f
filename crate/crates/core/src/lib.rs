pub mod algebra;
pub mod error;
pub mod euler;
pub mod field;
pub mod format;
pub mod forms;
pub mod linalg;
pub mod matrix;
pub mod count;
pub mod ext;
pub mod hom;
pub mod instances;
pub mod iso;
pub mod module;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
