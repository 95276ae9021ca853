//! Ordinal-indexed growth hierarchies, a tiny bit-machine, and a prediction
//! game for measuring how fast a predictor can keep up with an evader.

/// Serializes a type through its `Display`/`FromStr` text form.
macro_rules! serde_via_text {
    ($t:ty) => {
        impl serde::Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> serde::Deserialize<'de> for $t {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let text = <String as serde::Deserialize>::deserialize(d)?;
                text.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

pub mod arena;
pub mod budget;
pub mod hierarchy;
pub mod machine;
pub mod measures;
pub mod ordinal;
pub mod zoo;

pub use budget::{BudgetExceeded, BudgetLimit, EvalBudget};
pub use hierarchy::{eval_hierarchy, HierarchyEvaluator, HierarchyKind};
pub use ordinal::Ordinal;
