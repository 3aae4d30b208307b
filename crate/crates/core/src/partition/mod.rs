//! Closed-form task partitioning for TUEs and SUEs.

pub mod sue;
pub mod tue;

pub use sue::{
    cloud_admission_sue, count_cloud_sues, local_cloud_split, local_only, partition_all_sues,
    solve_local_cloud, SuePartitioning,
};
pub use tue::{
    cloud_admission_tue, count_cloud_tues, local_edge_cloud_split, local_edge_split,
    partition_all_tues, solve_local_edge, solve_local_edge_cloud, TuePartitioning,
};
