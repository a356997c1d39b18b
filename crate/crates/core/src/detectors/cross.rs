use serde::Serialize;

use crate::error::Result;
use crate::sets::GroundSet;

use super::broken_syndetic::{check_broken_syndetic, BrokenSyndeticParams};
use super::certificate::*;
use super::ladder::Ladder;
use super::pw::{check_pw_syndetic, PwParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Agreement {
    BothAccept,
    BothRefute,
    /// Includes any inconclusive verdict.
    DisagreeWithCaps,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgreementReport {
    pub pw: Verdict<PWSyndeticCertificate>,
    pub broken_syndetic: Verdict<BrokenSyndeticCertificate>,
    pub agreement: Agreement,
    pub caps: Caps,
}

/// Shared caps for both checkers.
pub fn cross_params(ladder: Ladder, f_cap: usize, probe_budget: usize) -> (PwParams, BrokenSyndeticParams) {
    (
        PwParams {
            ladder: ladder.clone(),
            f_cap,
            probe_budget,
        },
        BrokenSyndeticParams::new(ladder, f_cap),
    )
}

pub fn cross_check_pws_bsyn(a: &GroundSet, pw: &PwParams, bs: &BrokenSyndeticParams) -> Result<AgreementReport> {
    let pv = check_pw_syndetic(a, pw)?;
    let bv = check_broken_syndetic(a, bs)?;
    let agreement = match (&pv, &bv) {
        (Verdict::Certificate(_), Verdict::Certificate(_)) => Agreement::BothAccept,
        (Verdict::Refutation(_), Verdict::Refutation(_)) => Agreement::BothRefute,
        _ => Agreement::DisagreeWithCaps,
    };
    let caps = Caps::from([
        ("depth".to_string(), pw.ladder.depth() as u64),
        ("f_cap".to_string(), pw.f_cap as u64),
        ("piece_cap".to_string(), bs.piece_cap as u64),
        ("probe_budget".to_string(), pw.probe_budget as u64),
    ]);
    Ok(AgreementReport {
        pw: pv,
        broken_syndetic: bv,
        agreement,
        caps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::Rat;
    use crate::semigroup::WindowGrid;

    #[test]
    fn empty_set_both_refute() {
        let g = WindowGrid::dyadic(16).unwrap();
        let (pw, bs) = cross_params(Ladder::halving(&Rat::one(), 2, |_| 2).unwrap(), 2, 8);
        let rep = cross_check_pws_bsyn(&GroundSet::empty(&g), &pw, &bs).unwrap();
        assert_eq!(rep.agreement, Agreement::BothRefute);
        let rep = cross_check_pws_bsyn(&GroundSet::full(&g), &pw, &bs).unwrap();
        assert_eq!(rep.agreement, Agreement::BothAccept);
    }
}
