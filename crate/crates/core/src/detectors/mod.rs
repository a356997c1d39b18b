//! Certificate checkers and bounded searchers for the five set classes.

pub mod broken_ip;
pub mod broken_syndetic;
pub mod certificate;
mod combos;
pub mod cross;
pub mod doc;
pub mod hindman;
pub mod ip;
pub mod ladder;
pub mod pw;
pub mod replay;
pub mod syndetic;

pub use broken_ip::check_broken_ip;
pub use broken_syndetic::{check_broken_syndetic, BrokenSyndeticParams};
pub use certificate::*;
pub use cross::{cross_check_pws_bsyn, Agreement, AgreementReport};
pub use hindman::{hindman_block_oracle, BlockSumWitness};
pub use ip::{check_ip_witness, search_ip_seed};
pub use ladder::{Ladder, Rung};
pub use pw::{check_pw_syndetic, PwParams};
pub use syndetic::check_syndetic;
