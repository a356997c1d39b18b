//! Canonical JSON documents for verdicts.
//!
//! Every document has exactly the keys `caps`, `class`, `rungs`, `seed`,
//! `shifters` and `verdict`. Objects are emitted with sorted keys, so equal
//! verdicts serialize to equal bytes.

use serde_json::{json, Value};

use super::certificate::*;

/// Per-class layout of a certificate inside a document.
pub trait Documented {
    fn rungs(&self) -> Value;
    fn seed(&self) -> Value {
        Value::Null
    }
    fn shifters(&self) -> Value {
        json!([])
    }
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("certificate types serialize")
}

impl Documented for IPWitness {
    fn rungs(&self) -> Value {
        json!([{ "length": self.length }])
    }
    fn seed(&self) -> Value {
        to_value(&self.seed)
    }
}

impl Documented for SyndeticCertificate {
    fn rungs(&self) -> Value {
        to_value(&self.rungs)
    }
}

impl Documented for BrokenIPCertificate {
    fn rungs(&self) -> Value {
        to_value(&self.rungs)
    }
    fn seed(&self) -> Value {
        to_value(&self.seed)
    }
    fn shifters(&self) -> Value {
        to_value(&self.rungs.iter().map(|r| &r.shifter).collect::<Vec<_>>())
    }
}

impl Documented for BrokenSyndeticCertificate {
    fn rungs(&self) -> Value {
        let base = json!({
            "choice": to_value(&self.base),
            "elements": to_value(&self.base_elements),
            "piece_cap": self.piece_cap,
            "piece_window": to_value(&self.piece_window),
            "shifter_in_set": self.shifter_in_set,
        });
        Value::Array(
            self.rungs
                .iter()
                .zip(&self.syndetic.rungs)
                .map(|(r, cover)| {
                    json!({
                        "base": base,
                        "base_cover": to_value(cover),
                        "delta": to_value(&r.delta),
                        "pieces": to_value(&r.pieces),
                    })
                })
                .collect(),
        )
    }
    fn shifters(&self) -> Value {
        to_value(
            &self
                .rungs
                .iter()
                .flat_map(|r| r.pieces.iter().map(|p| &p.shifter))
                .collect::<Vec<_>>(),
        )
    }
}

impl Documented for PWSyndeticCertificate {
    fn rungs(&self) -> Value {
        to_value(&self.levels)
    }
    fn shifters(&self) -> Value {
        match &self.probes {
            PwProbes::Uniform { shift } => json!([to_value(shift)]),
            PwProbes::PerProbe { entries } => to_value(entries),
        }
    }
}

/// The document for `verdict`. `caps` describes the search limits the caller
/// used; refutations and inconclusive verdicts merge in their own caps.
pub fn document<C: Documented>(class: &str, verdict: &Verdict<C>, caps: &Caps) -> Value {
    let mut all = caps.clone();
    let (rungs, seed, shifters) = match verdict {
        Verdict::Certificate(c) => (c.rungs(), c.seed(), c.shifters()),
        Verdict::Refutation(r) => {
            all.extend(r.caps.clone());
            (
                json!([{ "obligation": to_value(&r.obligation), "rung": r.rung }]),
                Value::Null,
                json!([]),
            )
        }
        Verdict::Inconclusive(i) => {
            all.extend(i.caps.clone());
            (json!([{ "reason": i.reason, "rung": i.rung }]), Value::Null, json!([]))
        }
    };
    json!({
        "caps": to_value(&all),
        "class": class,
        "rungs": rungs,
        "seed": seed,
        "shifters": shifters,
        "verdict": verdict.label(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::Rat;
    use crate::sets::FSSeed;

    #[test]
    fn keys_are_sorted_and_stable() {
        let w = IPWitness {
            seed: FSSeed::tight(vec![Rat::new(1, 4), Rat::new(1, 16)]).unwrap(),
            length: 2,
        };
        let v = Verdict::Certificate(w);
        let text = serde_json::to_string(&document("ip", &v, &Caps::new())).unwrap();
        assert_eq!(
            text,
            r#"{"caps":{},"class":"ip","rungs":[{"length":2}],"seed":{"bound":"1/2","xs":["1/4","1/16"]},"shifters":[],"verdict":"certificate"}"#
        );
    }
}
