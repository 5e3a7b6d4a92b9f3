//! Marked points, canonical divisor representatives and the F-curve test.

mod bvector;
mod partition;
mod subset;

pub use bvector::{boundary_class, psi_class, BVector};
pub use partition::{
    enumerate_f_partitions, f_intersection, f_partition_count, is_f_nef, FNefVerdict, FPartition,
    FPartitions,
};
pub use subset::{canonicalize, CanonSubset, GroundSet, PointSet, MAX_POINTS};
pub(crate) use subset::canonical_unchecked;
