//! Checks of the forgetting assumptions and the certificates they yield.

pub mod auto;
pub mod cells;
pub mod certificate;
pub mod cluster;
pub mod enumerate;
pub mod lmsm;
pub mod positive_row;
pub mod primitive;
pub mod sopot;
pub mod yplus;

pub use auto::certify;
pub use certificate::{
    rho_from_n0, verify_certificate, Ball, BlockSet, CellConstraint, Coordinate, ForgettingCertificate, Provenance,
};
pub use cluster::{certificate_from_cluster, certify_by_cluster, find_clusters, Cluster, ClusterReport};
pub use enumerate::{check_a1_a2_finite, CheckOutcome, FailureReport, DEFAULT_R_MAX};
pub use lmsm::check_lmsm;
pub use positive_row::{check_positive_row, PositiveRowOutcome};
pub use primitive::{check_primitive, Primitivity};
pub use sopot::{check_sopot, SopotOutcome};
pub use yplus::{enumerate_y_plus, enumerate_y_plus_admissible, YPlusSet};
