//! Ground-truth labelling: crosschecking probe failures against
//! contract-summary indicators.
//!
//! A token earns `NonTrapdoor` only on a fully clean bill — both probe
//! legs passed and the audit found nothing.  It earns `Trapdoor` only
//! when the probe's decisive failure names the same identifier as some
//! indicator: the failure trace's cause, one of its frames, or (for fee
//! manipulation, which overcharges rather than reverts) the fee variable
//! on the transfer receipt.  Every other combination is `Unknown`,
//! including failures with blanked-out error traces, which deliberately
//! defeat identifier matching.

use serde::{Deserialize, Serialize};

use crate::probe::ProbeOutcome;
use crate::semantic::Indicator;

/// Final call on one token.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Trapdoor,
    NonTrapdoor,
    Unknown,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Trapdoor => "trapdoor",
            Verdict::NonTrapdoor => "non_trapdoor",
            Verdict::Unknown => "unknown",
        })
    }
}

/// Where the matched indicator's identifier showed up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchSite {
    /// The terminal cause of the failure trace.
    Cause,
    /// A call frame's function name.
    Frame,
    /// The fee variable on the transfer receipt.
    FeeMetadata,
}

/// Verdict plus the evidence that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Label {
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matched_indicator: Option<Indicator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matched_in: Option<MatchSite>,
    pub probe: ProbeOutcome,
}

/// The decisive leg failed: either the sell ran and failed, or the buy
/// itself failed (so the sell never ran).
fn decisively_failed(probe: &ProbeOutcome) -> bool {
    probe.sell_ok == Some(false) || !probe.buy_ok
}

fn find_match(probe: &ProbeOutcome, indicators: &[Indicator]) -> Option<(Indicator, MatchSite)> {
    if let Some(trace) = probe.decisive_trace() {
        // Cause matches outrank frame matches; indicators keep their
        // canonical (category, identifier) order within each pass.
        for indicator in indicators {
            if !trace.cause.identifier.is_empty() && indicator.identifier == trace.cause.identifier
            {
                return Some((indicator.clone(), MatchSite::Cause));
            }
        }
        for indicator in indicators {
            if trace
                .frames
                .iter()
                .any(|f| !f.function_name.is_empty() && f.function_name == indicator.identifier)
            {
                return Some((indicator.clone(), MatchSite::Frame));
            }
        }
    }
    if let Some(fee_identifier) = probe.decisive_fee_identifier() {
        for indicator in indicators {
            if indicator.identifier == fee_identifier {
                return Some((indicator.clone(), MatchSite::FeeMetadata));
            }
        }
    }
    None
}

/// Apply the labelling rules to one token's probe outcome and indicator
/// list.  The three verdicts are mutually exclusive by construction:
/// `NonTrapdoor` requires a clean pass, `Trapdoor` requires a failure.
pub fn label_token(probe: &ProbeOutcome, indicators: &[Indicator]) -> Label {
    if probe.clean_pass() && indicators.is_empty() {
        return Label {
            verdict: Verdict::NonTrapdoor,
            matched_indicator: None,
            matched_in: None,
            probe: probe.clone(),
        };
    }
    if decisively_failed(probe) {
        if let Some((indicator, site)) = find_match(probe, indicators) {
            return Label {
                verdict: Verdict::Trapdoor,
                matched_indicator: Some(indicator),
                matched_in: Some(site),
                probe: probe.clone(),
            };
        }
    }
    Label {
        verdict: Verdict::Unknown,
        matched_indicator: None,
        matched_in: None,
        probe: probe.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantic::{Evidence, Mutability};
    use crate::tokenvm::{Category, Cause, CauseKind, ErrorTrace, Frame};
    use crate::types::Ratio;

    fn clean_probe() -> ProbeOutcome {
        ProbeOutcome {
            buy_ok: true,
            sell_ok: Some(true),
            buy_fee_observed: Some(Ratio::new(0, 1)),
            sell_fee_observed: Some(Ratio::new(0, 1)),
            buy_trace: None,
            sell_trace: None,
            buy_fee_identifier: None,
            sell_fee_identifier: None,
        }
    }

    fn sell_fail(trace: ErrorTrace) -> ProbeOutcome {
        ProbeOutcome {
            sell_ok: Some(false),
            sell_trace: Some(trace),
            sell_fee_observed: None,
            ..clean_probe()
        }
    }

    fn trace(cause_identifier: &str, frame_names: &[&str]) -> ErrorTrace {
        ErrorTrace {
            frames: frame_names
                .iter()
                .enumerate()
                .map(|(i, name)| Frame {
                    function_name: name.to_string(),
                    site_id: i as u32,
                })
                .collect(),
            cause: Cause {
                kind: CauseKind::Reverted,
                identifier: cause_identifier.to_string(),
                message: if cause_identifier.is_empty() {
                    String::new()
                } else {
                    format!("{cause_identifier} rejected the transfer")
                },
            },
        }
    }

    fn indicator(category: Category, identifier: &str) -> Indicator {
        Indicator {
            category,
            identifier: identifier.to_string(),
            evidence: Evidence {
                end_node_id: 7,
                mutator: "setMembers".to_string(),
                via: Mutability::Backdoor,
            },
        }
    }

    #[test]
    fn clean_pass_with_no_indicators_is_non_trapdoor() {
        let label = label_token(&clean_probe(), &[]);
        assert_eq!(label.verdict, Verdict::NonTrapdoor);
        assert!(label.matched_indicator.is_none());
    }

    #[test]
    fn sell_failure_with_cause_matched_indicator_is_trapdoor() {
        let probe = sell_fail(trace("_safeOwner", &["transfer"]));
        let indicators = [indicator(Category::Permission, "_safeOwner")];
        let label = label_token(&probe, &indicators);
        assert_eq!(label.verdict, Verdict::Trapdoor);
        let matched = label.matched_indicator.expect("matched");
        assert_eq!(matched.category, Category::Permission);
        assert_eq!(matched.identifier, "_safeOwner");
        assert_eq!(label.matched_in, Some(MatchSite::Cause));
    }

    #[test]
    fn blank_trace_with_unmatched_indicators_is_unknown() {
        let probe = sell_fail(trace("", &[""]));
        let indicators = [indicator(Category::Suspension, "paused")];
        let label = label_token(&probe, &indicators);
        assert_eq!(label.verdict, Verdict::Unknown);
        assert!(label.matched_indicator.is_none());
    }

    #[test]
    fn clean_pass_with_indicators_is_unknown_never_non_trapdoor() {
        let probe = clean_probe();
        let indicators = [indicator(Category::AmountLimit, "_maxTxAmount")];
        let label = label_token(&probe, &indicators);
        assert_eq!(label.verdict, Verdict::Unknown);
    }

    #[test]
    fn frame_name_match_is_recorded_as_frame_site() {
        let probe = sell_fail(trace("someOtherVar", &["transfer", "burnToken"]));
        let indicators = [indicator(Category::InvalidCallback, "burnToken")];
        let label = label_token(&probe, &indicators);
        assert_eq!(label.verdict, Verdict::Trapdoor);
        assert_eq!(label.matched_in, Some(MatchSite::Frame));
    }

    #[test]
    fn excessive_fee_matches_through_the_receipt_identifier() {
        let probe = ProbeOutcome {
            sell_ok: Some(false),
            sell_fee_observed: Some(Ratio::new(40, 100)),
            sell_fee_identifier: Some("sellFee".to_string()),
            ..clean_probe()
        };
        let indicators = [indicator(Category::FeeManipulation, "sellFee")];
        let label = label_token(&probe, &indicators);
        assert_eq!(label.verdict, Verdict::Trapdoor);
        assert_eq!(label.matched_in, Some(MatchSite::FeeMetadata));
        let matched = label.matched_indicator.expect("matched");
        assert_eq!(matched.category, Category::FeeManipulation);
    }

    #[test]
    fn buy_failure_without_a_sell_leg_still_matches() {
        let probe = ProbeOutcome {
            buy_ok: false,
            sell_ok: None,
            buy_trace: Some(trace("paused", &["transfer"])),
            buy_fee_observed: None,
            sell_fee_observed: None,
            ..clean_probe()
        };
        let indicators = [indicator(Category::Suspension, "paused")];
        let label = label_token(&probe, &indicators);
        assert_eq!(label.verdict, Verdict::Trapdoor);
        assert_eq!(label.matched_in, Some(MatchSite::Cause));
    }

    #[test]
    fn cause_match_outranks_frame_match() {
        // One indicator matches a frame, a later-ordered one matches the
        // cause; the cause match wins.
        let probe = sell_fail(trace("paused", &["limitedTransfer"]));
        let indicators = [
            indicator(Category::AmountLimit, "limitedTransfer"),
            indicator(Category::Suspension, "paused"),
        ];
        let label = label_token(&probe, &indicators);
        assert_eq!(label.matched_in, Some(MatchSite::Cause));
        assert_eq!(label.matched_indicator.unwrap().identifier, "paused");
    }

    #[test]
    fn unmatched_failure_with_indicators_is_unknown() {
        let probe = sell_fail(trace("entirelyDifferent", &["transfer"]));
        let indicators = [indicator(Category::Permission, "whitelisted")];
        let label = label_token(&probe, &indicators);
        assert_eq!(label.verdict, Verdict::Unknown);
    }

    #[test]
    fn verdicts_are_mutually_exclusive_by_construction() {
        // NonTrapdoor requires a clean pass; Trapdoor requires a decisive
        // failure; the same probe can never satisfy both.
        let probes = [
            clean_probe(),
            sell_fail(trace("x", &[])),
            ProbeOutcome {
                buy_ok: false,
                sell_ok: None,
                ..clean_probe()
            },
        ];
        for probe in &probes {
            assert!(!(probe.clean_pass() && super::decisively_failed(probe)));
        }
    }
}
