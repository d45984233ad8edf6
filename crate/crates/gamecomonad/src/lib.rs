//! Generalised-quantifier pebble games and their game comonads on finite
//! relational structures.

pub mod comonad;
pub mod decomp;
pub mod enumerate;
pub mod error;
pub mod game;
pub mod history;
pub mod logic;
pub mod matching;
pub mod structures;

pub use error::{Error, Result};
pub use structures::{
    enumerate_partial_maps, hom_exists, is_hom, is_partial_hom, iso_exists, load_structure, PartialHom, RelStructure,
    RelSymbol, Signature, Tuple,
};
