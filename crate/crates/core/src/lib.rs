// SPDX-License-Identifier: Apache-2.0

//! Design of parallel prefix adders and compressor-tree multipliers as
//! single-player games.
//!
//! * [`prefix_tree`] holds the adder structure and its edit actions.
//! * [`adder_search`] plays the adder game with Monte-Carlo tree search.
//! * [`compressor_tree`] is the multiplier reduction environment.
//! * [`ppo_agent`] learns compressor schedules with clipped policy gradients.
//! * [`cost_eval`] scores designs (theoretical, proxy, external command).
//! * [`hdl_netlist`] lowers designs to gates, simulates and emits Verilog.
//! * [`codesign`] alternates both agents for a full multiplier.

pub mod adder_search;
pub mod codesign;
pub mod compressor_tree;
pub mod cost_eval;
pub mod hdl_netlist;
pub mod ppo_agent;
pub mod prefix_tree;
