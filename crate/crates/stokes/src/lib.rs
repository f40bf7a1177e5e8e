//! Drag of axisymmetric bodies in Stokes flow from a boundary integral
//! formulation with ring Stokeslets.

pub mod bem;
pub mod elliptic;
pub mod kernel;
pub mod mesh;

pub use bem::{assemble_single_layer, solve_drag, write_traction_csv, BemConfig, BemError, DragResult};
pub use elliptic::{complete_elliptic_e, complete_elliptic_k};
pub use kernel::ring_stokeslet;
pub use mesh::{mesh_meridian, profile_to_mesh, BoundaryMesh, Element, Meridian, MeshError, Spheroid};
