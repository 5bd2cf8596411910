//! Exact conditional inference on observation windows.

pub mod block;
pub mod engine;
pub mod pmap;
pub mod transition;

pub use block::{block_states, smoothing_block, BlockDistribution};
pub use engine::{forward_backward, Backward, Forward, ForwardBackward, PathContext, DEFAULT_M_CAP};
pub use pmap::{argmax, pmap_decode};
pub use transition::{f_matrix, f_matrix_in, u_from_parts, u_matrix, ConditionalTransition, TransitionKind};
