//! Finite relational structures, their powers, and the value types built on them.

pub mod families;
pub mod partial;
pub mod partition;
pub mod power;
pub mod relfile;
pub mod relset;
pub mod structure;

pub use families::{canonical_structure, verify_family, Family, FamilyData};
pub use partial::{reduce_columns, FunctionTable, PartialOpMap};
pub use partition::Partition;
pub use power::{power, PowerHandle};
pub use relset::RelationSet;
pub use structure::{
    induced_substructure, validate_structure, FiniteStructure, Induced, RawRelation, RawStructure, RelSource, Relation,
    Signature, Symbol, MATERIALIZE_LIMIT,
};
