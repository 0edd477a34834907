//! Central extensions of loop groups, their commutator pairings, the canonical
//! crossed module and fusion factorizations, computed on sampled loops.
//!
//! The crate is organised bottom-up:
//!
//! * [`liegroup`]: matrix groups, exp/log, invariant forms.
//! * [`loopspace`]: sampled loops and paths, the cup map, rep/res.
//! * [`cocycles`]: the loop-algebra cocycle, sheet integrals, holonomy, periods.
//! * [`abelcoh`]: exact bihomomorphisms and 2-cocycles on finite abelian groups.
//! * [`centralext`]: the cocycle model and the path (holonomy) model.
//! * [`crossedmod`], [`twogroup`]: crossed modules, strict 2-groups, fusion.
//!
//! [`battery`] holds the seeded sample sets used by the verification suites in
//! [`suites`], whose results are collected in [`report::Report`].

pub mod abelcoh;
pub mod battery;
pub mod centralext;
pub mod cocycles;
pub mod crossedmod;
pub mod error;
pub mod io;
pub mod liegroup;
pub mod loopspace;
pub mod phase;
pub mod report;
pub mod suites;
pub mod twogroup;
mod util;

pub use error::{Error, Result};
pub use phase::Phase;
pub use util::thread_cap;
