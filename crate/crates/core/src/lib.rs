//! Polar code construction over BMS channels, SC / SSC / Fast-SSC decoding,
//! and decoding latency measured as the node count of the pruned decoding
//! tree.

pub mod channel;
pub mod construction;
pub mod codec;
pub mod latency;
pub mod sim;
