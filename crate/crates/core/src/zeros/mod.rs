//! Zero counting near `h = 0`: the bound formulas, exact rank checks of the
//! matrices behind them, sign-change counting and sharp realizations.

mod bound;
mod jacobian;
mod params;
mod rank;
mod realize;
mod sign;

pub use bound::{max_zero_bound, BoundQuery};
pub use jacobian::{jacobian_rank, JacobianReport};
pub use params::LadderParams;
pub use rank::{d_tilde, rank_D_piecewise, rank_D_smooth, RankReport, RecursionStep};
pub use realize::{
    describe, realize_zeros, MarginCheck, MarginPoint, NamedValue, Realization, RealizationMethod,
    RealizeOptions,
};
pub use sign::{count_sign_changes, geometric_grid, Bracket, SignChangeReport, BRACKET_WIDTH};
