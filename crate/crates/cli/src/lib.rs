//! The pencil document format shared by the `pencilrank` commands.

pub mod document;

pub use document::{DocError, EntryMode, PencilDocument};
