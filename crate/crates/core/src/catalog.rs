//! Particle mass table and named systems.
//!
//! The table is a flat text file, one particle per line:
//! `name mass_e charge source`, with `#` comments. The shipped table is
//! embedded; [`load`] honours the `C3S_PARTICLE_TABLE` environment variable.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::criterion::{instability_test, StabilityReport};
use crate::error::{Error, Result};
use crate::frames::{Charge, Mass, ParticleSystem};

/// Environment variable naming an alternative table file.
pub const TABLE_ENV: &str = "C3S_PARTICLE_TABLE";

/// Text of the shipped table.
pub const SHIPPED_TABLE: &str = include_str!("../data/particles.txt");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleEntry {
    pub name: String,
    /// Mass in electron masses.
    pub mass: f64,
    /// Mass field exactly as written, so rendering reproduces the file.
    #[serde(skip)]
    mass_text: String,
    pub charge: Charge,
    pub source: String,
}

impl ParticleEntry {
    pub fn new(name: &str, mass: f64, charge: Charge, source: &str) -> Result<Self> {
        validate(name, mass, source, 0)?;
        Ok(Self { name: name.into(), mass, mass_text: format!("{mass}"), charge, source: source.into() })
    }
}

fn validate(name: &str, mass: f64, source: &str, line: usize) -> Result<()> {
    let bad = |msg: String| Err(Error::TableParse { line, msg });
    if name.is_empty() || name.contains(char::is_whitespace) || name.starts_with('#') {
        return bad(format!("invalid particle name {name:?}"));
    }
    if !(mass > 0.0 && mass.is_finite()) {
        return bad(format!("mass of {name} must be positive"));
    }
    if source.is_empty() || source.contains(char::is_whitespace) {
        return bad(format!("invalid source tag for {name}"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
enum Line {
    Other(String),
    Entry(usize),
}

/// A parsed table. Comment and blank lines are kept for round-tripping.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleTable {
    entries: Vec<ParticleEntry>,
    lines: Vec<Line>,
}

impl ParticleTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<ParticleEntry> = Vec::new();
        let mut lines = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                lines.push(Line::Other(raw.to_string()));
                continue;
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            let [name, mass_text, charge_text, source] = fields[..] else {
                return Err(Error::TableParse {
                    line,
                    msg: format!("expected 4 fields, found {}", fields.len()),
                });
            };
            let mass: f64 = mass_text
                .parse()
                .map_err(|_| Error::TableParse { line, msg: format!("bad mass {mass_text:?}") })?;
            let charge = match charge_text {
                "+1" | "1" => Charge::Plus,
                "-1" => Charge::Minus,
                _ => return Err(Error::TableParse { line, msg: format!("bad charge {charge_text:?}") }),
            };
            validate(name, mass, source, line)?;
            if entries.iter().any(|e| e.name == name) {
                return Err(Error::TableParse { line, msg: format!("duplicate particle {name:?}") });
            }
            let entry = ParticleEntry {
                name: name.into(),
                mass,
                mass_text: mass_text.into(),
                charge,
                source: source.into(),
            };
            lines.push(Line::Entry(entries.len()));
            entries.push(entry);
        }
        if !text.ends_with('\n') && !text.is_empty() {
            return Err(Error::TableParse { line: lines.len(), msg: "missing final newline".into() });
        }
        Ok(Self { entries, lines })
    }

    /// Canonical text: comments verbatim, entries single-space separated.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            match l {
                Line::Other(s) => out.push_str(s),
                Line::Entry(i) => out.push_str(&render_entry(&self.entries[*i])),
            }
            out.push('\n');
        }
        out
    }

    pub fn entries(&self) -> &[ParticleEntry] {
        &self.entries
    }

    pub fn lookup(&self, name: &str) -> Result<&ParticleEntry> {
        self.entries.iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownParticle(name.to_string()))
    }

    /// Appends an entry; names must stay unique.
    pub fn insert(&mut self, entry: ParticleEntry) -> Result<()> {
        if self.entries.iter().any(|e| e.name == entry.name) {
            return Err(Error::TableParse { line: 0, msg: format!("duplicate particle {:?}", entry.name) });
        }
        self.lines.push(Line::Entry(self.entries.len()));
        self.entries.push(entry);
        Ok(())
    }

    /// A `(m1, m2, m3)` system from three particle names, in the given order.
    pub fn system(&self, names: [&str; 3]) -> Result<ParticleSystem<f64>> {
        let entries = names.map(|n| self.lookup(n));
        let [a, b, c] = entries;
        let (a, b, c) = (a?, b?, c?);
        ParticleSystem::new(
            [Mass::Finite(a.mass), Mass::Finite(b.mass), Mass::Finite(c.mass)],
            [a.charge, b.charge, c.charge],
        )
    }
}

fn render_entry(e: &ParticleEntry) -> String {
    let charge = match e.charge {
        Charge::Plus => "+1",
        Charge::Minus => "-1",
    };
    format!("{} {} {} {}", e.name, e.mass_text, charge, e.source)
}

/// The embedded table.
pub fn shipped() -> ParticleTable {
    ParticleTable::parse(SHIPPED_TABLE).expect("shipped particle table is valid")
}

pub fn load_file(path: &Path) -> Result<ParticleTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ParticleTable::parse(&text)
}

/// The table named by `C3S_PARTICLE_TABLE`, or the shipped one.
pub fn load() -> Result<ParticleTable> {
    match std::env::var_os(TABLE_ENV) {
        Some(p) if !p.is_empty() => load_file(Path::new(&p)),
        _ => Ok(shipped()),
    }
}

/// A labelled three-particle system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedSystem {
    pub label: &'static str,
    pub particles: [&'static str; 3],
    pub description: &'static str,
}

pub const NAMED_SYSTEMS: &[NamedSystem] = &[
    NamedSystem { label: "pmue", particles: ["p", "mu", "e"], description: "muonic hydrogen ion p mu- e-" },
    NamedSystem { label: "mupe", particles: ["mu", "p", "e+"], description: "mu- p e+" },
    NamedSystem { label: "hminus", particles: ["p", "e", "e"], description: "hydrogen anion p e- e-" },
    NamedSystem { label: "psminus", particles: ["e+", "e", "e"], description: "positronium anion e+ e- e-" },
];

pub fn named_system(label: &str) -> Result<&'static NamedSystem> {
    NAMED_SYSTEMS.iter().find(|s| s.label == label).ok_or_else(|| Error::UnknownSystem(label.to_string()))
}

/// [`instability_test`] on a named system resolved against `table`.
pub fn classify_named_in(table: &ParticleTable, label: &str) -> Result<StabilityReport<f64>> {
    let named = named_system(label)?;
    instability_test(&table.system(named.particles)?)
}

/// [`classify_named_in`] with the table from [`load`].
pub fn classify_named(label: &str) -> Result<StabilityReport<f64>> {
    classify_named_in(&load()?, label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criterion::Verdict;
    use approx::assert_relative_eq;

    #[test]
    fn lookups() {
        let t = shipped();
        assert_eq!(t.lookup("e").unwrap().mass, 1.0);
        assert_eq!(t.lookup("mu").unwrap().mass, 206.7682830);
        assert_eq!(t.lookup("p").unwrap().source, "CODATA-config");
        assert_eq!(t.lookup("xx"), Err(Error::UnknownParticle("xx".into())));
    }

    #[test]
    fn round_trip() {
        let t = shipped();
        assert_eq!(t.render(), SHIPPED_TABLE);
        assert_eq!(ParticleTable::parse(&t.render()).unwrap(), t);
    }

    #[test]
    fn parse_errors() {
        for bad in ["e 1\n", "e x -1 s\n", "e 1 2 s\n", "e -1 -1 s\n", "e 1 -1 s\ne 2 -1 s\n", "e 1 -1 s"] {
            assert!(matches!(ParticleTable::parse(bad), Err(Error::TableParse { .. })), "{bad:?}");
        }
    }

    #[test]
    fn non_canonical_lines_render_canonically() {
        let t = ParticleTable::parse("  x   2.50  1  src\n").unwrap();
        assert_eq!(t.render(), "x 2.50 +1 src\n");
    }

    #[test]
    fn named_classifications() {
        let t = shipped();
        let r = classify_named_in(&t, "pmue").unwrap();
        assert_eq!(r.verdict, Verdict::ProvablyUnstable);
        assert_eq!(classify_named_in(&t, "mupe").unwrap().verdict, Verdict::ProvablyUnstable);
        assert_eq!(classify_named_in(&t, "hminus").unwrap().verdict, Verdict::Inconclusive);
        let ps = classify_named_in(&t, "psminus").unwrap();
        assert_eq!(ps.verdict, Verdict::Inconclusive);
        assert_relative_eq!(ps.mass_ratio, 4.0 / 3.0, max_relative = 1e-14);
        assert_eq!(classify_named_in(&t, "nope").unwrap_err(), Error::UnknownSystem("nope".into()));
    }
}
