//! Dense complex linear algebra over labeled multipartite quantum systems:
//! states, channels, instruments, purifications, dilations, the standard
//! state/channel catalog, and the entropic and distance machinery built on
//! top of them.
//!
//! All objects are immutable values after construction and safe to share
//! across threads read-only.

pub mod channel;
pub mod error;
pub mod info;
pub mod json;
pub mod layout;
pub mod linalg;
pub mod random;
pub mod standard;
pub mod state;

pub use channel::{apply, apply_instrument, ChannelSpec, Dynamic, InstrumentSpec, IsometrySpec};
pub use error::{CoreError, Result};
pub use layout::SystemLayout;
pub use linalg::{CMatrix, C64};
pub use state::StateSpec;
