//! Parsers for range and ordering flags.

use qorder_core::qset::{OddSquarefree, QOrdering};

/// Parses `start:stop[:step]`, a comma list, or a single integer.
///
/// Ranges include `start` and every `start + i*step` not past `stop`, so
/// `stop` is included only when the stepping lands on it.
pub fn parse_range(text: &str) -> Result<Vec<u64>, String> {
    let bad = || format!("malformed range {text:?}; expected start:stop[:step], a,b,c or n");
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(bad());
        }
        let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
        let start = num(parts[0])?;
        let stop = num(parts[1])?;
        let step = if parts.len() == 3 { num(parts[2])? } else { 1 };
        if step == 0 || stop < start {
            return Err(bad());
        }
        Ok((start..=stop).step_by(step as usize).collect())
    } else {
        text.split(',').map(|s| s.trim().parse::<u64>().map_err(|_| bad())).collect()
    }
}

/// Parses `byvalue`, `factorcount`, `shuffle:SEED:PREFIX` or
/// `explicit:q1,q2,...`.
pub fn parse_ordering(text: &str, bound: u64) -> Result<QOrdering, String> {
    let lower = text.to_ascii_lowercase();
    let mut parts = lower.splitn(2, ':');
    let head = parts.next().unwrap_or_default();
    let rest = parts.next();
    match (head, rest) {
        ("byvalue", None) => Ok(QOrdering::by_value(bound)),
        ("factorcount", None) => Ok(QOrdering::by_factor_count(bound)),
        ("shuffle", Some(rest)) => {
            let (seed, prefix) =
                rest.split_once(':').ok_or_else(|| format!("expected shuffle:SEED:PREFIX, got {text:?}"))?;
            let seed = seed.parse().map_err(|_| format!("bad seed in {text:?}"))?;
            let prefix = prefix.parse().map_err(|_| format!("bad prefix in {text:?}"))?;
            Ok(QOrdering::seeded_shuffle(seed, prefix, bound))
        }
        ("explicit", Some(list)) => {
            let elements = list
                .split(',')
                .map(|v| {
                    let v: u64 = v.trim().parse().map_err(|_| format!("bad element {v:?}"))?;
                    OddSquarefree::new(v).map_err(|e| e.to_string())
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(QOrdering::explicit(elements))
        }
        _ => Err(format!(
            "unknown ordering {text:?}; use byvalue, factorcount, shuffle:SEED:PREFIX or explicit:q1,q2,..."
        )),
    }
}

/// Parses `n0:n1` as an inclusive window.
pub fn parse_window(text: &str) -> Result<(u64, u64), String> {
    let (a, b) = text.split_once(':').ok_or_else(|| format!("expected n0:n1, got {text:?}"))?;
    let a = a.parse().map_err(|_| format!("bad window start in {text:?}"))?;
    let b = b.parse().map_err(|_| format!("bad window end in {text:?}"))?;
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use qorder_core::qset::OrderingStrategy;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1:10000:100").unwrap().len(), 100);
        assert_eq!(parse_range("1:64").unwrap().len(), 64);
        assert_eq!(parse_range("2").unwrap(), vec![2]);
        assert_eq!(parse_range("1,5,9").unwrap(), vec![1, 5, 9]);
        assert_eq!(parse_range("0:10:5").unwrap(), vec![0, 5, 10]);
        for bad in ["", "1:", "a:3", "5:1", "1:5:0", "1:2:3:4"] {
            assert!(parse_range(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn orderings() {
        assert_eq!(parse_ordering("byvalue", 99).unwrap(), QOrdering::by_value(99));
        assert_eq!(
            parse_ordering("shuffle:7:64", 1000).unwrap().strategy,
            OrderingStrategy::SeededShuffle { seed: 7, prefix_length: 64 }
        );
        let e = parse_ordering("explicit:15,3", 0).unwrap();
        assert_eq!(e.descriptor(), "explicit[15,3]");
        assert!(parse_ordering("explicit:9", 0).is_err());
        assert!(parse_ordering("random", 10).is_err());
        assert!(parse_ordering("shuffle:7", 10).is_err());
    }

    #[test]
    fn windows() {
        assert_eq!(parse_window("1000:2000").unwrap(), (1000, 2000));
        assert!(parse_window("1000").is_err());
    }
}
