//! Exact arithmetic for Zink rings, Dieudonné frames and windows, the
//! Breuil–Kisin comparison and the explicit BT functor over finite local rings.

pub mod abelian;
pub mod algebra;
pub mod breuil_kisin;
pub mod bt;
pub mod error;
pub mod frames;
pub mod modular;
pub mod witt;
pub mod windows;
pub mod zink;

pub use algebra::{
    AlgebraHom, CoeffKind, DividedPowerStructure, FiniteAlgebra, Ideal, PdKind, PrimeParams,
    RingSpec,
};
pub use error::{AlgebraError, BkError, BtError, FrameError, WindowError, WittError, ZinkError};
pub use breuil_kisin::{BkSetup, BkSpec, BreuilWindow};
pub use bt::{torsion_points, BtOptions, DisplaySource, PointsGroup, TestAlgebra, TorsionPoints};
pub use frames::{Frame, FrameHom, FrameKind, SElem};
pub use windows::Window;
pub use witt::{WittGroup, WittVector};
