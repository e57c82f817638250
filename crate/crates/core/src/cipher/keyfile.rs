//! Text form of a [`CipherKey`].
//!
//! ```text
//! version=1
//! mode=W3
//! block_size=5
//! scramble_seed=<u64>|none
//! schedule_seed=<u64>            (or rules=r,r,...  or hybrid_seeds=s,s,...)
//! axis=row|column                (optional on read, default row)
//! steps=<u32>                    (optional on read, default 1)
//! geometry=<rows>x<cols>:<p1>x<p2>   (one line per channel)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Unknown or repeated
//! fields are rejected.

use std::fmt;
use std::str::FromStr;

use super::{CipherKey, CipherMode, LineAxis, PlaneGeometry, RuleSpec, KEY_VERSION};
use crate::ca_rules::RuleId;
use crate::error::{Error, Result};

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for CipherKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "version={KEY_VERSION}")?;
        writeln!(f, "mode={}", self.mode)?;
        writeln!(f, "block_size={}", self.block_size)?;
        match self.scramble_seed {
            Some(s) => writeln!(f, "scramble_seed={s}")?,
            None => writeln!(f, "scramble_seed=none")?,
        }
        match &self.rules {
            RuleSpec::Seeded(s) => writeln!(f, "schedule_seed={s}")?,
            RuleSpec::Rules(list) => writeln!(f, "rules={}", join(list))?,
            RuleSpec::HybridSeeds(list) => writeln!(f, "hybrid_seeds={}", join(list))?,
        }
        let axis = match self.axis {
            LineAxis::Row => "row",
            LineAxis::Column => "column",
        };
        writeln!(f, "axis={axis}")?;
        writeln!(f, "steps={}", self.steps)?;
        for g in &self.geometry {
            writeln!(
                f,
                "geometry={}x{}:{}x{}",
                g.rows, g.cols, g.padded_rows, g.padded_cols
            )?;
        }
        Ok(())
    }
}

fn num<T: FromStr>(field: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Key(format!("{field}: cannot parse {value:?}")))
}

fn list<T: FromStr>(field: &str, value: &str) -> Result<Vec<T>> {
    if value.trim().is_empty() {
        return Err(Error::Key(format!("{field}: empty list")));
    }
    value.split(',').map(|v| num(field, v)).collect()
}

fn pair(field: &str, value: &str) -> Result<(usize, usize)> {
    let (a, b) = value
        .split_once('x')
        .ok_or_else(|| Error::Key(format!("{field}: expected AxB, got {value:?}")))?;
    Ok((num(field, a)?, num(field, b)?))
}

fn set_once<T>(slot: &mut Option<T>, field: &str, value: T) -> Result<()> {
    if slot.replace(value).is_some() {
        return Err(Error::Key(format!("duplicate field {field}")));
    }
    Ok(())
}

impl FromStr for CipherKey {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut version: Option<u32> = None;
        let mut mode: Option<CipherMode> = None;
        let mut block_size: Option<usize> = None;
        let mut scramble: Option<Option<u64>> = None;
        let mut rules: Option<RuleSpec> = None;
        let mut axis: Option<LineAxis> = None;
        let mut steps: Option<u32> = None;
        let mut geometry = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (field, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Key(format!("line {}: expected field=value", lineno + 1)))?;
            let (field, value) = (field.trim(), value.trim());
            match field {
                "version" => set_once(&mut version, field, num(field, value)?)?,
                "mode" => set_once(&mut mode, field, value.parse()?)?,
                "block_size" => set_once(&mut block_size, field, num(field, value)?)?,
                "scramble_seed" => {
                    let s = if value.eq_ignore_ascii_case("none") {
                        None
                    } else {
                        Some(num(field, value)?)
                    };
                    set_once(&mut scramble, field, s)?
                }
                "schedule_seed" | "rules" | "hybrid_seeds" => {
                    let spec = match field {
                        "schedule_seed" => RuleSpec::Seeded(num(field, value)?),
                        "rules" => RuleSpec::Rules(
                            list::<u32>(field, value)?
                                .into_iter()
                                .map(RuleId::new)
                                .collect::<Result<_>>()?,
                        ),
                        _ => RuleSpec::HybridSeeds(list(field, value)?),
                    };
                    if rules.is_some() {
                        return Err(Error::Key(
                            "only one of schedule_seed, rules, hybrid_seeds may appear".into(),
                        ));
                    }
                    rules = Some(spec);
                }
                "axis" => {
                    let a = match value.to_ascii_lowercase().as_str() {
                        "row" => LineAxis::Row,
                        "column" => LineAxis::Column,
                        _ => return Err(Error::Key(format!("axis: unknown value {value:?}"))),
                    };
                    set_once(&mut axis, field, a)?
                }
                "steps" => set_once(&mut steps, field, num(field, value)?)?,
                "geometry" => {
                    let (px, padded) = value.split_once(':').ok_or_else(|| {
                        Error::Key(format!("geometry: expected RxC:P1xP2, got {value:?}"))
                    })?;
                    let (rows, cols) = pair(field, px)?;
                    let (padded_rows, padded_cols) = pair(field, padded)?;
                    geometry.push(PlaneGeometry {
                        rows,
                        cols,
                        padded_rows,
                        padded_cols,
                    });
                }
                other => return Err(Error::Key(format!("unknown field {other:?}"))),
            }
        }

        let missing = |f: &str| Error::Key(format!("missing field {f}"));
        let version = version.ok_or_else(|| missing("version"))?;
        if version != KEY_VERSION {
            return Err(Error::Key(format!("unsupported key version {version}")));
        }
        let key = CipherKey {
            mode: mode.ok_or_else(|| missing("mode"))?,
            block_size: block_size.ok_or_else(|| missing("block_size"))?,
            scramble_seed: scramble.ok_or_else(|| missing("scramble_seed"))?,
            rules: rules.ok_or_else(|| missing("schedule_seed, rules or hybrid_seeds"))?,
            axis: axis.unwrap_or_default(),
            steps: steps.unwrap_or(1),
            geometry,
        };
        key.validate()?;
        match (&key.rules, key.mode.is_hybrid()) {
            (RuleSpec::Rules(_), true) | (RuleSpec::HybridSeeds(_), false) => Err(Error::Key(
                format!("rule list does not fit mode {}", key.mode),
            )),
            _ => Ok(key),
        }
    }
}

impl CipherKey {
    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        std::fs::read_to_string(path)
            .map_err(|e| Error::io(path, e))?
            .parse()
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_string()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn seeded_key_text() {
        let key = CipherKey::generate(CipherMode::W3, 9, 256, 256, 1);
        let text = key.to_string();
        assert!(text.starts_with("version=1\nmode=W3\nblock_size=5\n"));
        assert!(text.ends_with("axis=row\nsteps=1\ngeometry=256x256:260x2050\n"));
        assert_eq!(text.parse::<CipherKey>().unwrap(), key);
    }

    #[test]
    fn comments_defaults_and_lists() {
        let text = "# hand written\nversion=1\nmode=w1\n\nblock_size=5\n\
                    scramble_seed=none\nrules=15\ngeometry=5x2:5x20\n";
        let key: CipherKey = text.parse().unwrap();
        assert_eq!(key.scramble_seed, None);
        assert_eq!(key.rules, RuleSpec::Rules(vec![RuleId::new(15).unwrap()]));
        assert_eq!(key.axis, LineAxis::Row);
        assert_eq!(key.steps, 1);
    }

    #[test]
    fn rejects_malformed() {
        let base = "version=1\nmode=W1\nblock_size=5\nscramble_seed=3\nschedule_seed=4\ngeometry=5x2:5x20\n";
        assert!(base.parse::<CipherKey>().is_ok());
        let bad = [
            format!("{base}color=blue\n"),
            format!("{base}mode=W2\n"),
            format!("{base}rules=1\n"),
            base.replace("version=1", "version=2"),
            base.replace("5x2:5x20", "5x2:5x25"),
            base.replace("mode=W1", "mode=W9"),
            base.replace("schedule_seed=4", "hybrid_seeds=4"),
            base.replace("scramble_seed=3\n", ""),
            base.replace("geometry=5x2:5x20\n", ""),
            base.replace("block_size=5", "block_size=0"),
            format!("{base}steps=0\n"),
            format!("{base}just text\n"),
        ];
        for text in bad {
            assert!(
                matches!(text.parse::<CipherKey>(), Err(Error::Key(_))),
                "{text}"
            );
        }
    }

    fn arb_key() -> impl Strategy<Value = CipherKey> {
        (
            0usize..6,
            1usize..=8,
            proptest::option::of(any::<u64>()),
            any::<u64>(),
            proptest::collection::vec(any::<u64>(), 1..4),
            any::<bool>(),
            1u32..5,
            (1usize..100, 1usize..100),
            prop_oneof![Just(1usize), Just(3usize)],
        )
            .prop_map(|(m, b, scr, seed, seeds, col, steps, (r, c), ch)| {
                let mode = CipherMode::ALL[m];
                let rules = match (mode.is_hybrid(), seeds.len() % 2) {
                    (_, 0) => RuleSpec::Seeded(seed),
                    (true, _) => RuleSpec::HybridSeeds(seeds),
                    (false, _) => RuleSpec::Rules(
                        seeds
                            .iter()
                            .map(|s| RuleId::new((*s % 512) as u32).unwrap())
                            .collect(),
                    ),
                };
                CipherKey {
                    mode,
                    block_size: b,
                    scramble_seed: scr,
                    rules,
                    axis: if col { LineAxis::Column } else { LineAxis::Row },
                    steps,
                    geometry: vec![PlaneGeometry::for_plane(r, c, b); ch],
                }
            })
    }

    proptest! {
        #[test]
        fn text_round_trip(key in arb_key()) {
            let text = key.to_string();
            prop_assert_eq!(text.parse::<CipherKey>().unwrap(), key);
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.key");
        let key = CipherKey::generate(CipherMode::W6, 1, 10, 10, 3);
        key.save(&path).unwrap();
        assert_eq!(CipherKey::load(&path).unwrap(), key);
        assert!(matches!(
            CipherKey::load(dir.path().join("none")),
            Err(Error::Io { .. })
        ));
    }
}
