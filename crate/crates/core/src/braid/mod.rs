//! Positive braid words, walks, and exact braid-matrix oracles.

mod matrix;
mod perm;
mod walk;
mod word;

pub use matrix::{
    braid_gen, braid_matrix_product, bruhat_factor, bruhat_perm, cell_sample,
    mumon_check, mumon_symbolic, point_coords, walk_of_point, BraidMatrixError,
    MumonTable, RatMatrix,
};
pub use perm::Perm;
pub use walk::{admissibility_generators, admissible, enumerate_walks, Walk};
pub use word::{coset_min_reps, lift_walk_order, shape_braid, BraidWord, WVec};
