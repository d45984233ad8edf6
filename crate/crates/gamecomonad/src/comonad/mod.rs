//! Truncated pebbling comonads `T_k` and `H_{n,k}`.

pub mod export;
pub mod hella;
pub mod kleisli;
pub mod laws;
pub mod literal;
pub mod symbolic;
pub mod tk;

pub use hella::{build_hnk, HellaSkeleton, HellaStructure};
pub use kleisli::{
    classify_morphism, counit_morphism, ensure_identity, kleisli_compose, kleisli_iso_check, map_morphism,
    morphism_from_nk_strategy, morphism_from_strategy, solved_morphism, strategy_from_morphism, Classification, HMap,
    HomViolation, IsoCheck, KleisliMorphism, StrategyMorphism,
};
pub use laws::{check_comonad_laws, check_hnk_laws, check_tk_laws, Grade, LawReport, LawViolation, Mutation};
pub use literal::{losing_block_play, losing_pebble_play, position_ok, BlockGame};
pub use symbolic::{classes_related, comult_history, counit_history, Class, ClassId};
pub use tk::{build_tk, PebbleStructure};
