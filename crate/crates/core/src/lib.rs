//! Exact geometry and combinatorics of the decorated golden-triangle tiling.

pub mod geom;
pub mod goldfield;
pub mod rules;
pub mod shell;
pub mod subst;
pub mod tiles;
pub mod verify;

pub use geom::{GeomError, Isometry, Point, Segment, Triangle};
pub use goldfield::{AlgebraicNum, Sign};
pub use rules::{RulesError, Star, StarCatalog, StarClass};
pub use shell::{RenderStyle, ShellError};
pub use subst::{ComposeError, SubstError};
pub use tiles::{DecoratedTile, Direction, Patch, SideDecoration, SideId, TileError, TileShape};
