//! Plain-text policy checkpoints.
//!
//! ```text
//! player 1
//! <infoset_id> <action_index> <logit>
//! ...
//! player 2
//! <infoset_id> <action_index> <logit>
//! ```
//!
//! Logits are written with Rust's shortest round-trip formatting, so a
//! saved policy reloads bit-identically. Lines starting with `#` are comments.

use std::path::Path;

use super::SoftmaxPolicy;
use crate::efg::{ExtensiveFormGame, Player};
use crate::error::{Error, Result};

pub fn to_string(policies: &[SoftmaxPolicy; 2]) -> String {
    let mut out = String::new();
    for (p, policy) in policies.iter().enumerate() {
        out.push_str(&format!("player {}\n", p + 1));
        for (i, logits) in policy.logits.iter().enumerate() {
            for (a, l) in logits.iter().enumerate() {
                out.push_str(&format!("{i} {a} {l}\n"));
            }
        }
    }
    out
}

/// Parses a checkpoint and checks it covers every information set of `game`.
pub fn parse(text: &str, game: &ExtensiveFormGame) -> Result<[SoftmaxPolicy; 2]> {
    let mut logits: [Vec<Vec<Option<f64>>>; 2] = Player::BOTH.map(|p| {
        game.infosets(p)
            .iter()
            .map(|s| vec![None; s.num_actions()])
            .collect()
    });
    let mut current: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = idx + 1;
        let err = |msg: String| Error::Parse { line: lineno, msg };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("player") {
            let p: usize = rest
                .trim()
                .parse()
                .map_err(|_| err(format!("invalid player header {line:?}")))?;
            if !(1..=2).contains(&p) {
                return Err(err(format!("player must be 1 or 2, got {p}")));
            }
            current = Some(p - 1);
            continue;
        }
        let p = current.ok_or_else(|| err("entry before any `player` header".into()))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(err(format!(
                "expected `infoset action logit`, found {line:?}"
            )));
        }
        let infoset: usize = fields[0]
            .parse()
            .map_err(|_| err(format!("invalid infoset id {:?}", fields[0])))?;
        let action: usize = fields[1]
            .parse()
            .map_err(|_| err(format!("invalid action index {:?}", fields[1])))?;
        let logit: f64 = fields[2]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| err(format!("invalid logit {:?}", fields[2])))?;
        let slot = logits[p]
            .get_mut(infoset)
            .and_then(|s| s.get_mut(action))
            .ok_or_else(|| err(format!("player {} has no ({infoset}, {action})", p + 1)))?;
        if slot.replace(logit).is_some() {
            return Err(err(format!("duplicate entry ({infoset}, {action})")));
        }
    }
    let mut out = Vec::with_capacity(2);
    for (p, sets) in logits.into_iter().enumerate() {
        let mut policy = Vec::with_capacity(sets.len());
        for (i, set) in sets.into_iter().enumerate() {
            let row: Option<Vec<f64>> = set.into_iter().collect();
            policy.push(row.ok_or(Error::MissingInfoset {
                player: p + 1,
                infoset: i,
            })?);
        }
        out.push(SoftmaxPolicy { logits: policy });
    }
    let p2 = out.pop().unwrap();
    let p1 = out.pop().unwrap();
    Ok([p1, p2])
}

pub fn save(path: impl AsRef<Path>, policies: &[SoftmaxPolicy; 2]) -> Result<()> {
    std::fs::write(path, to_string(policies))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>, game: &ExtensiveFormGame) -> Result<[SoftmaxPolicy; 2]> {
    parse(&std::fs::read_to_string(path)?, game)
}
