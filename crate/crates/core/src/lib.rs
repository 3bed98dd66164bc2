pub mod ergodic;
pub mod error;
pub mod families;
pub mod folner;
pub mod grid;
pub mod group;
pub mod systems;
pub mod tiling;

pub use error::{LabError, Result};
pub use group::{Elem, EnumBudget, FinSet, Group};
