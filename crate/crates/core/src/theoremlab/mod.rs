//! Verification suites pairing the library's symbolic answers with
//! independent brute-force oracles.
//!
//! Every suite is deterministic in `(budget, seed)`: random instance `i`
//! draws from its own ChaCha stream, instances run in parallel, and the
//! retained samples are the canonically smallest ones, so reports do not
//! depend on scheduling. Elapsed time is kept out of the serialized report.

pub mod gen;
mod suites;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subset_nets::Verdict;

pub use suites::*;

/// At most this many violations and exhibits are kept verbatim per suite.
pub const SAMPLE_CAP: usize = 20;

pub const DEFAULT_BUDGET: u64 = 1000;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub instance: String,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub budget: u64,
    pub instances: u64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    pub unknowns: u64,
    /// Conclusions that fail without the theorem's hypotheses; informative, never failures.
    pub exhibit_count: u64,
    pub exhibits: Vec<Violation>,
    /// Named counters such as the number of trap instances drawn.
    pub counters: BTreeMap<String, u64>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    pub fn counter(&self, name: &str) -> u64 {
        self.counters.get(name).copied().unwrap_or(0)
    }
}

/// Running totals for one suite.
#[derive(Clone, Debug, Default)]
pub struct Tally {
    instances: u64,
    unknowns: u64,
    violation_count: u64,
    violations: Vec<Violation>,
    exhibit_count: u64,
    exhibits: Vec<Violation>,
    counters: BTreeMap<String, u64>,
}

fn keep_smallest(v: &mut Vec<Violation>) {
    v.sort();
    v.dedup();
    v.truncate(SAMPLE_CAP);
}

impl Tally {
    pub fn instance(&mut self) {
        self.instances += 1;
    }

    pub fn count(&mut self, name: &str, by: u64) {
        *self.counters.entry(name.to_string()).or_default() += by;
    }

    /// Records a violation unless `ok`; the description closures run only on failure.
    pub fn check(&mut self, ok: bool, instance: impl FnOnce() -> String, expected: impl FnOnce() -> String, got: impl FnOnce() -> String) {
        if !ok {
            self.violation_count += 1;
            self.violations.push(Violation {
                instance: instance(),
                expected: expected(),
                got: got(),
            });
            if self.violations.len() > 4 * SAMPLE_CAP {
                keep_smallest(&mut self.violations);
            }
        }
    }

    pub fn check_eq<T: PartialEq + std::fmt::Display>(&mut self, instance: impl FnOnce() -> String, expected: &T, got: &T) {
        self.check(expected == got, instance, || expected.to_string(), || got.to_string());
    }

    pub fn exhibit(&mut self, instance: impl FnOnce() -> String, expected: impl FnOnce() -> String, got: impl FnOnce() -> String) {
        self.exhibit_count += 1;
        self.exhibits.push(Violation {
            instance: instance(),
            expected: expected(),
            got: got(),
        });
        if self.exhibits.len() > 4 * SAMPLE_CAP {
            keep_smallest(&mut self.exhibits);
        }
    }

    /// Counts unknown verdicts; they are never turned into violations.
    pub fn note_verdicts(&mut self, verdicts: &[Verdict]) {
        self.unknowns += verdicts.iter().filter(|v| v.is_unknown()).count() as u64;
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        self.instances += other.instances;
        self.unknowns += other.unknowns;
        self.violation_count += other.violation_count;
        self.violations.extend(other.violations);
        keep_smallest(&mut self.violations);
        self.exhibit_count += other.exhibit_count;
        self.exhibits.extend(other.exhibits);
        keep_smallest(&mut self.exhibits);
        for (k, v) in other.counters {
            *self.counters.entry(k).or_default() += v;
        }
        self
    }

    fn into_report(mut self, suite: &str, budget: u64, seed: u64, elapsed: Duration) -> SuiteReport {
        keep_smallest(&mut self.violations);
        keep_smallest(&mut self.exhibits);
        SuiteReport {
            suite: suite.to_string(),
            seed,
            budget,
            instances: self.instances,
            violation_count: self.violation_count,
            violations: self.violations,
            unknowns: self.unknowns,
            exhibit_count: self.exhibit_count,
            exhibits: self.exhibits,
            counters: self.counters,
            elapsed,
        }
    }
}

/// Runs `f` over `units` in parallel and merges the tallies.
pub fn par_tally<T: Sync, F: Fn(&T) -> Tally + Sync + Send>(units: &[T], f: F) -> Tally {
    units.par_iter().map(f).reduce(Tally::default, Tally::merge)
}

/// Runs `f(i, rng_i)` for `i < n`, each with its own deterministic stream.
pub fn par_random<F: Fn(u64, &mut ChaCha8Rng) -> Tally + Sync + Send>(seed: u64, tag: u64, n: u64, f: F) -> Tally {
    (0..n)
        .into_par_iter()
        .map(|i| f(i, &mut instance_rng(seed, tag, i)))
        .reduce(Tally::default, Tally::merge)
}

pub fn instance_rng(seed: u64, tag: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(i);
    rng
}

type SuiteFn = fn(u64, u64) -> Tally;

/// Suite identifiers in execution order.
pub const SUITES: &[(&str, SuiteFn)] = &[
    ("limit_set_oracle", suites::limit_set_oracle),
    ("limit_set_characterization", suites::limit_set_characterization),
    ("kuratowski_equality", suites::kuratowski_equality),
    ("separation_containments", suites::separation_containments),
    ("compactness_equivalences", suites::compactness_equivalences),
    ("pseudometrizable_equivalence", suites::pseudometrizable_equivalence),
    ("sequential_limits", suites::sequential_limits),
    ("semidistance_criteria", suites::semidistance_criteria),
    ("semicontinuity", suites::semicontinuity),
    ("omega_consistency", suites::omega_consistency),
];

pub fn suite_ids() -> Vec<&'static str> {
    SUITES.iter().map(|(id, _)| *id).collect()
}

pub fn run_suite(id: &str, budget: u64, seed: u64) -> Result<SuiteReport> {
    let (name, f) = SUITES
        .iter()
        .find(|(name, _)| *name == id)
        .ok_or_else(|| Error::Unsupported(format!("unknown suite {id:?}; known: {}", suite_ids().join(", "))))?;
    let start = Instant::now();
    let tally = f(budget, seed);
    Ok(tally.into_report(name, budget, seed, start.elapsed()))
}

/// Runs `all` or a single suite.
pub fn run_suites(selection: &str, budget: u64, seed: u64) -> Result<Vec<SuiteReport>> {
    if selection == "all" {
        suite_ids().into_iter().map(|id| run_suite(id, budget, seed)).collect()
    } else {
        Ok(vec![run_suite(selection, budget, seed)?])
    }
}
