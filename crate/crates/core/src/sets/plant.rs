//! Generators of sets with a known broken-IP or broken-syndetic structure.

use crate::detectors::broken_syndetic::BrokenSyndeticParams;
use crate::detectors::{
    check_syndetic, BaseChoice, BrokenIPCertificate, BrokenIpRung, BrokenSyndeticCertificate, BrokenSyndeticRung,
    Ladder, PieceShift, Verdict,
};
use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::rng::Rng;
use crate::semigroup::WindowGrid;

use super::fs::FSSeed;
use super::ground::materialize;
use super::spec::SetSpec;

/// `A = ⋃_k (a_k + FS(<b>_1^{L_k}))` with each `a_k` drawn uniformly from
/// the grid points of `(0, delta_k)` that keep the block inside the grid.
pub fn plant_broken_ip(
    seed: &FSSeed,
    ladder: &Ladder,
    rng_seed: u64,
    grid: &WindowGrid,
) -> Result<(SetSpec, BrokenIPCertificate)> {
    let n = grid.modulus();
    let mut ks = Vec::with_capacity(seed.len());
    for x in seed.terms() {
        ks.push(x.numerator_over(n).ok_or_else(|| Error::UnrepresentableConstant {
            value: x.clone(),
            modulus: n,
        })?);
    }
    let mut rng = Rng::new(rng_seed);
    let mut parts = Vec::with_capacity(ladder.depth());
    let mut rungs = Vec::with_capacity(ladder.depth());
    for (k, rung) in ladder.rungs().iter().enumerate() {
        let len = rung.cap;
        if len > seed.len() {
            return Err(Error::InvalidSeed(format!(
                "rung {} asks for {len} terms of a {}-term seed",
                k + 1,
                seed.len()
            )));
        }
        let top: u64 = ks[..len].iter().sum();
        let room = (grid.size() as u64).saturating_sub(top);
        let slots = (grid.count_below(&rung.delta) as u64).min(room);
        if slots == 0 {
            return Err(Error::InfeasibleRung {
                rung: k + 1,
                reason: if grid.count_below(&rung.delta) == 0 {
                    format!("window (0, {}) holds no grid point", rung.delta)
                } else {
                    "no shifter keeps the block inside the grid".into()
                },
            });
        }
        let a = grid.element(rng.range(1, slots) as usize);
        parts.push(SetSpec::shift(a.clone(), SetSpec::FiniteSums(seed.terms()[..len].to_vec())));
        rungs.push(BrokenIpRung {
            delta: rung.delta.clone(),
            length: len,
            shifter: a,
        });
    }
    Ok((
        SetSpec::union_all(parts),
        BrokenIPCertificate {
            seed: seed.clone(),
            rungs,
        },
    ))
}

/// `A = ⋃_k (a_k + (B ∩ (0, omega]))` for a base `B` that passes the
/// syndetic check, with `omega = delta_max - delta_1` and `a_k` uniform in
/// `(0, delta_k)`. With `shifter_in_set` each `a_k` is added to `A` as well.
pub fn plant_broken_syndetic(
    base: &SetSpec,
    params: &BrokenSyndeticParams,
    rng_seed: u64,
    grid: &WindowGrid,
) -> Result<(SetSpec, BrokenSyndeticCertificate)> {
    let b = materialize(base, grid)?;
    let syndetic = match check_syndetic(&b, &params.ladder, params.f_cap)? {
        Verdict::Certificate(c) => c,
        Verdict::Refutation(r) => return Err(Error::NotSyndeticBase { rung: r.rung }),
        Verdict::Inconclusive(i) => return Err(Error::NotSyndeticBase { rung: i.rung }),
    };
    let omega = params.piece_window(grid.delta_max());
    let piece: Vec<Rat> = b.elements().into_iter().filter(|x| *x <= omega).collect();
    if piece.is_empty() {
        return Err(Error::NotSyndeticBase { rung: 1 });
    }
    let mut rng = Rng::new(rng_seed);
    let mut parts = Vec::new();
    let mut rungs = Vec::with_capacity(params.ladder.depth());
    for rung in params.ladder.rungs() {
        let slots = grid.count_below(&rung.delta) as u64;
        let a = grid.element(rng.range(1, slots) as usize);
        parts.push(SetSpec::shift(a.clone(), SetSpec::Explicit(piece.clone())));
        if params.shifter_in_set {
            parts.push(SetSpec::Explicit(vec![a.clone()]));
        }
        rungs.push(BrokenSyndeticRung {
            delta: rung.delta.clone(),
            pieces: vec![PieceShift {
                piece: piece.clone(),
                shifter: a,
            }],
        });
    }
    Ok((
        SetSpec::union_all(parts),
        BrokenSyndeticCertificate {
            base: BaseChoice::Given,
            base_elements: b.elements(),
            syndetic,
            piece_window: omega,
            piece_cap: params.piece_cap.max(1),
            shifter_in_set: params.shifter_in_set,
            rungs,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::{check_broken_ip, check_broken_syndetic, replay};

    fn r(n: u64, d: u64) -> Rat {
        Rat::new(n, d)
    }

    #[test]
    fn planted_broken_ip_verifies() {
        let g = WindowGrid::dyadic(64).unwrap();
        let seed = FSSeed::tight(vec![r(1, 4), r(1, 16)]).unwrap();
        let ladder = Ladder::from_pairs(&[(r(1, 2), 2), (r(1, 4), 2)]).unwrap();
        let (spec, cert) = plant_broken_ip(&seed, &ladder, 7, &g).unwrap();
        let a = materialize(&spec, &g).unwrap();
        assert!(replay::replay_broken_ip(&cert, &a).is_ok());
        assert!(check_broken_ip(&a, &ladder, 2).unwrap().is_certificate());
        assert_eq!(plant_broken_ip(&seed, &ladder, 7, &g).unwrap(), (spec, cert));
    }

    #[test]
    fn window_below_resolution() {
        let g = WindowGrid::dyadic(16).unwrap();
        let seed = FSSeed::tight(vec![r(1, 4)]).unwrap();
        let ladder = Ladder::from_pairs(&[(r(1, 64), 1)]).unwrap();
        assert!(matches!(
            plant_broken_ip(&seed, &ladder, 0, &g),
            Err(Error::InfeasibleRung { rung: 1, .. })
        ));
    }

    #[test]
    fn planted_broken_syndetic_verifies() {
        let g = WindowGrid::dyadic(32).unwrap();
        let params = BrokenSyndeticParams::new(Ladder::halving(&Rat::one(), 2, |_| 2).unwrap(), 2);
        let base = SetSpec::Pattern { period: 2, residues: vec![1] };
        let (spec, cert) = plant_broken_syndetic(&base, &params, 3, &g).unwrap();
        let a = materialize(&spec, &g).unwrap();
        assert!(replay::replay_broken_syndetic(&cert, &a).is_ok());
        assert!(check_broken_syndetic(&a, &params).unwrap().is_certificate());
        assert_eq!(plant_broken_syndetic(&base, &params, 3, &g).unwrap(), (spec, cert));
    }

    #[test]
    fn empty_base_is_rejected() {
        let g = WindowGrid::dyadic(32).unwrap();
        let params = BrokenSyndeticParams::new(Ladder::halving(&Rat::one(), 2, |_| 2).unwrap(), 2);
        assert!(matches!(
            plant_broken_syndetic(&SetSpec::empty(), &params, 0, &g),
            Err(Error::NotSyndeticBase { rung: 1 })
        ));
    }
}
