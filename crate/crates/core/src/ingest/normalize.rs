use std::collections::HashMap;

use super::{EventLog, RecordError, SourceKind};
use crate::error::{Error, Result};

fn fold(id: &str) -> String {
    id.trim().to_lowercase()
}

/// Alias map from raw ids to canonical ids. Keys and values are trimmed and
/// case-folded; chains `a → b → c` resolve to their end.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AliasRules {
    map: HashMap<String, String>,
}

impl AliasRules {
    pub fn new<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut direct: HashMap<String, String> = HashMap::new();
        for (raw, canonical) in pairs {
            let (raw, canonical) = (fold(&raw), fold(&canonical));
            if raw.is_empty() || canonical.is_empty() {
                return Err(Error::Config("alias rules may not contain empty ids".into()));
            }
            if raw == canonical {
                continue;
            }
            if let Some(prev) = direct.get(&raw) {
                if *prev != canonical {
                    return Err(Error::Config(format!(
                        "conflicting aliases: {raw:?} maps to both {prev:?} and {canonical:?}"
                    )));
                }
            }
            direct.insert(raw, canonical);
        }
        let mut map = HashMap::with_capacity(direct.len());
        for start in direct.keys() {
            let mut seen = vec![start.as_str()];
            let mut cur = &direct[start];
            while let Some(next) = direct.get(cur) {
                if seen.contains(&cur.as_str()) {
                    return Err(Error::Config(format!("alias rules form a cycle through {cur:?}")));
                }
                seen.push(cur);
                cur = next;
            }
            map.insert(start.clone(), cur.clone());
        }
        Ok(Self { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Canonical form of `id`.
    pub fn resolve(&self, id: &str) -> String {
        let f = fold(id);
        self.map.get(&f).cloned().unwrap_or(f)
    }
}

/// Rewrites actor ids (and object ids of actor-to-actor logs) to their
/// canonical form. Artifact names are only trimmed. Events whose actor
/// becomes empty are dropped and reported.
pub fn normalize_ids(log: &EventLog, rules: &AliasRules) -> EventLog {
    let mut out = EventLog {
        kind: log.kind,
        events: Vec::with_capacity(log.len()),
        errors: log.errors.clone(),
    };
    for (k, e) in log.events.iter().enumerate() {
        let mut e = e.clone();
        e.actor = rules.resolve(&e.actor);
        e.object = match log.kind {
            SourceKind::Actor => rules.resolve(&e.object),
            SourceKind::Artifact => e.object.trim().to_string(),
        };
        if e.actor.is_empty() {
            out.errors.push(RecordError {
                line: 0,
                message: format!("event {} has an empty actor id", k + 1),
            });
            continue;
        }
        out.events.push(e);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::InteractionEvent;
    use proptest::prelude::*;

    fn ev(actor: &str, object: &str, t: i64) -> InteractionEvent {
        InteractionEvent {
            actor: actor.into(),
            object: object.into(),
            timestamp: t,
            weight: 1.0,
        }
    }

    fn rules(pairs: &[(&str, &str)]) -> Result<AliasRules> {
        AliasRules::new(pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())))
    }

    #[test]
    fn applying_twice_is_applying_once() {
        let r = rules(&[("A <a@x>", "A")]).unwrap();
        let log = EventLog::new(SourceKind::Artifact, vec![ev("A <a@x>", "f", 1), ev("B", "f", 2)]);
        let once = normalize_ids(&log, &r);
        assert_eq!(normalize_ids(&once, &r), once);
        assert_eq!(once.events[0].actor, "a");
    }

    #[test]
    fn fold_and_trim_without_rules() {
        let log = EventLog::new(SourceKind::Artifact, vec![ev("a ", "f", 1), ev("A", "f", 2)]);
        let out = normalize_ids(&log, &AliasRules::default());
        assert_eq!(out.actors(), vec!["a".to_string()]);
    }

    #[test]
    fn three_aliases_of_one_author() {
        let r = rules(&[("Alice <alice@home>", "alice"), ("alice smith", "alice"), ("A. Smith", "alice smith")]).unwrap();
        let log = EventLog::new(
            SourceKind::Artifact,
            vec![ev("Alice <alice@home>", "f", 1), ev("Alice Smith", "g", 2), ev("a. smith ", "h", 3), ev("bob", "f", 4)],
        );
        let out = normalize_ids(&log, &r);
        assert_eq!(out.events.iter().filter(|e| e.actor == "alice").count(), 3);
        assert_eq!(out.actors().len(), 2);
    }

    #[test]
    fn conflicts_and_cycles() {
        assert!(matches!(rules(&[("x", "a"), ("X ", "b")]), Err(Error::Config(_))));
        assert!(matches!(rules(&[("x", "y"), ("y", "x")]), Err(Error::Config(_))));
        assert!(rules(&[("x", "a"), ("x", "A")]).is_ok());
    }

    #[test]
    fn artifacts_keep_case_counterparties_do_not() {
        let log = EventLog::new(SourceKind::Artifact, vec![ev("a", " Src/Main.rs ", 1)]);
        assert_eq!(normalize_ids(&log, &AliasRules::default()).events[0].object, "Src/Main.rs");
        let log = EventLog::new(SourceKind::Actor, vec![ev("a", " Bob ", 1)]);
        assert_eq!(normalize_ids(&log, &AliasRules::default()).events[0].object, "bob");
    }

    fn arb_events() -> impl Strategy<Value = Vec<InteractionEvent>> {
        proptest::collection::vec(
            ("[ aAbBcC]{1,3}", "[ xXyY]{1,2}", 0i64..50).prop_map(|(a, o, t)| ev(&a, &o, t)),
            0..30,
        )
    }

    proptest! {
        #[test]
        fn idempotent_and_order_independent(events in arb_events(), seed in any::<u64>()) {
            let r = rules(&[("a", "b"), ("c", "b"), ("x", "y")]).unwrap();
            let events: Vec<_> = events.into_iter().filter(|e| !e.actor.trim().is_empty()).collect();
            let log = EventLog::new(SourceKind::Actor, events.clone());
            let once = normalize_ids(&log, &r);
            prop_assert_eq!(&normalize_ids(&once, &r), &once);

            let mut shuffled = events;
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let mut a = once.events.clone();
            let mut b = normalize_ids(&EventLog::new(SourceKind::Actor, shuffled), &r).events;
            let key = |e: &InteractionEvent| (e.actor.clone(), e.object.clone(), e.timestamp);
            a.sort_by_key(key);
            b.sort_by_key(key);
            prop_assert_eq!(a, b);
        }
    }
}
