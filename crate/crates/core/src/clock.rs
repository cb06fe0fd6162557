//! Logical clocks, steps and traces.
//!
//! A step is one tick of the universal clock `ms` (one millisecond of model
//! time). A [`Trace`] records, for every step `i` in `0..n`, the set of clocks
//! that tick at `i`; this is the tick function `t_c(i)`. The history `h_c(i)`
//! is the number of ticks of `c` at steps strictly before `i`, so `h_c(0) = 0`
//! and `h_c(i + 1) = h_c(i) + t_c(i)`.

use std::borrow::Borrow;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Name of the predeclared universal clock, ticking at every step.
pub const UNIVERSAL_CLOCK: &str = "ms";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClockError {
    #[error("invalid clock name {0:?}")]
    InvalidName(String),
    #[error("duplicate clock {0}")]
    Duplicate(String),
    #[error("undeclared clock {0}")]
    Undeclared(String),
    #[error("clock index {index} out of range for alphabet of {len} clocks")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("column for clock {0} has a different length")]
    RaggedColumn(String),
    #[error("step {step} out of range for trace of length {len}")]
    StepOutOfRange { step: usize, len: usize },
}

/// Name of a logical clock: ASCII letters, digits and underscores, not
/// starting with a digit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClockId(String);

impl ClockId {
    pub fn new(name: impl Into<String>) -> Result<Self, ClockError> {
        let name = name.into();
        if is_identifier(&name) {
            Ok(ClockId(name))
        } else {
            Err(ClockError::InvalidName(name))
        }
    }

    pub fn universal() -> Self {
        ClockId(UNIVERSAL_CLOCK.to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// True when `s` is a valid identifier (clock, definition or relation name).
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for ClockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for ClockId {
    type Err = ClockError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClockId::new(s)
    }
}

impl Borrow<str> for ClockId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for ClockId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Ordered set of uniquely named clocks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<ClockId>,
    index: HashMap<ClockId, usize>,
}

impl Alphabet {
    pub fn new<I>(clocks: I) -> Result<Self, ClockError>
    where
        I: IntoIterator<Item = ClockId>,
    {
        let mut alphabet = Alphabet::default();
        for clock in clocks {
            alphabet.push(clock)?;
        }
        Ok(alphabet)
    }

    /// Builds an alphabet from plain names, validating each one.
    pub fn from_names<I, S>(names: I) -> Result<Self, ClockError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let clocks = names
            .into_iter()
            .map(|n| ClockId::new(n.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Alphabet::new(clocks)
    }

    pub fn push(&mut self, clock: ClockId) -> Result<usize, ClockError> {
        if self.index.contains_key(&clock) {
            return Err(ClockError::Duplicate(clock.0));
        }
        let idx = self.names.len();
        self.index.insert(clock.clone(), idx);
        self.names.push(clock);
        Ok(idx)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn lookup(&self, clock: &ClockId) -> Option<usize> {
        self.index.get(clock).copied()
    }

    pub fn resolve(&self, name: &str) -> Result<usize, ClockError> {
        self.index_of(name)
            .ok_or_else(|| ClockError::Undeclared(name.to_string()))
    }

    pub fn name(&self, index: usize) -> &ClockId {
        &self.names[index]
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ClockId> {
        self.names.iter()
    }

    pub fn names(&self) -> &[ClockId] {
        &self.names
    }
}

/// Set of clock indices ticking at one step.
#[derive(Debug, Clone, Default)]
pub struct TickSet {
    words: Vec<u64>,
}

impl PartialEq for TickSet {
    fn eq(&self, other: &Self) -> bool {
        let n = self.words.len().max(other.words.len());
        (0..n).all(|i| self.words.get(i).unwrap_or(&0) == other.words.get(i).unwrap_or(&0))
    }
}

impl Eq for TickSet {}

impl TickSet {
    pub fn new() -> Self {
        TickSet::default()
    }

    pub fn with_capacity(clocks: usize) -> Self {
        TickSet {
            words: vec![0; clocks.div_ceil(64)],
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut set = TickSet::new();
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub fn insert(&mut self, index: usize) {
        let word = index / 64;
        if word >= self.words.len() {
            self.words.resize(word + 1, 0);
        }
        self.words[word] |= 1 << (index % 64);
    }

    pub fn remove(&mut self, index: usize) {
        if let Some(w) = self.words.get_mut(index / 64) {
            *w &= !(1 << (index % 64));
        }
    }

    pub fn contains(&self, index: usize) -> bool {
        self.words
            .get(index / 64)
            .is_some_and(|w| w & (1 << (index % 64)) != 0)
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Largest index in the set, if any.
    pub fn max(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    /// Indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + bit)
                }
            })
        })
    }
}

impl FromIterator<usize> for TickSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        TickSet::from_indices(iter)
    }
}

/// Finite step-indexed record of clock ticks.
///
/// Storage is sparse (the sorted clock indices ticking at each step, packed
/// contiguously); [`Trace::column`] gives the dense boolean view of one clock.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    alphabet: Alphabet,
    starts: Vec<usize>,
    ticks: Vec<u32>,
}

impl Trace {
    /// Empty trace over the given clocks. Fails on a duplicate name.
    pub fn new(clocks: Vec<ClockId>) -> Result<Self, ClockError> {
        Ok(Trace::with_alphabet(Alphabet::new(clocks)?))
    }

    pub fn with_alphabet(alphabet: Alphabet) -> Self {
        Trace {
            alphabet,
            starts: vec![0],
            ticks: Vec::new(),
        }
    }

    /// Builds a trace of length `len` from per-clock tick dates.
    pub fn from_dates<S: AsRef<str>>(
        clocks: &[(S, &[usize])],
        len: usize,
    ) -> Result<Self, ClockError> {
        let alphabet = Alphabet::from_names(clocks.iter().map(|(n, _)| n.as_ref()))?;
        let mut steps = vec![TickSet::with_capacity(alphabet.len()); len];
        for (ci, (_, dates)) in clocks.iter().enumerate() {
            for &d in dates.iter() {
                if d >= len {
                    return Err(ClockError::StepOutOfRange { step: d, len });
                }
                steps[d].insert(ci);
            }
        }
        let mut trace = Trace::with_alphabet(alphabet);
        for s in &steps {
            trace.push_step(s)?;
        }
        Ok(trace)
    }

    /// Builds a trace from dense per-clock columns, all of the same length.
    pub fn from_columns<S: AsRef<str>>(clocks: &[(S, Vec<bool>)]) -> Result<Self, ClockError> {
        let len = clocks.first().map_or(0, |(_, c)| c.len());
        let dates: Vec<(&str, Vec<usize>)> = clocks
            .iter()
            .map(|(n, col)| {
                let d = col
                    .iter()
                    .enumerate()
                    .filter_map(|(i, &t)| t.then_some(i))
                    .collect();
                (n.as_ref(), d)
            })
            .collect();
        for (n, c) in clocks {
            if c.len() != len {
                return Err(ClockError::RaggedColumn(n.as_ref().to_string()));
            }
        }
        let refs: Vec<(&str, &[usize])> = dates.iter().map(|(n, d)| (*n, d.as_slice())).collect();
        Trace::from_dates(&refs, len)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn clocks(&self) -> &[ClockId] {
        self.alphabet.names()
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.starts.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Appends one step. Every index in `ticks` must belong to the alphabet.
    pub fn push_step(&mut self, ticks: &TickSet) -> Result<(), ClockError> {
        if let Some(max) = ticks.max() {
            if max >= self.alphabet.len() {
                return Err(ClockError::IndexOutOfRange {
                    index: max,
                    len: self.alphabet.len(),
                });
            }
        }
        self.ticks.extend(ticks.iter().map(|i| i as u32));
        self.starts.push(self.ticks.len());
        Ok(())
    }

    /// Appends one step given the names of the ticking clocks.
    pub fn push_named<S: AsRef<str>>(&mut self, names: &[S]) -> Result<(), ClockError> {
        let mut set = TickSet::with_capacity(self.alphabet.len());
        for n in names {
            set.insert(self.alphabet.resolve(n.as_ref())?);
        }
        self.push_step(&set)
    }

    /// Sorted indices of the clocks ticking at step `i`.
    pub fn step_ticks(&self, i: usize) -> &[u32] {
        &self.ticks[self.starts[i]..self.starts[i + 1]]
    }

    pub fn step_set(&self, i: usize) -> TickSet {
        self.step_ticks(i).iter().map(|&c| c as usize).collect()
    }

    /// Iterator over the tick set of every step in order.
    pub fn steps(&self) -> impl Iterator<Item = TickSet> + '_ {
        (0..self.len()).map(|i| self.step_set(i))
    }

    /// `t_c(i)`.
    pub fn tick_at(&self, clock: &str, i: usize) -> Result<bool, ClockError> {
        let c = self.alphabet.resolve(clock)?;
        if i >= self.len() {
            return Err(ClockError::StepOutOfRange {
                step: i,
                len: self.len(),
            });
        }
        Ok(self.ticks_index(c, i))
    }

    fn ticks_index(&self, c: usize, i: usize) -> bool {
        self.step_ticks(i).binary_search(&(c as u32)).is_ok()
    }

    /// `h_c(i)`: ticks of `clock` at steps strictly before `i`, for `i <= len`.
    pub fn history_at(&self, clock: &str, i: usize) -> Result<u64, ClockError> {
        let c = self.alphabet.resolve(clock)?;
        if i > self.len() {
            return Err(ClockError::StepOutOfRange {
                step: i,
                len: self.len(),
            });
        }
        Ok((0..i).filter(|&s| self.ticks_index(c, s)).count() as u64)
    }

    /// Dense boolean view of one clock.
    pub fn column(&self, clock: usize) -> Vec<bool> {
        (0..self.len())
            .map(|i| self.ticks_index(clock, i))
            .collect()
    }

    pub fn column_by_name(&self, clock: &str) -> Result<Vec<bool>, ClockError> {
        Ok(self.column(self.alphabet.resolve(clock)?))
    }

    /// Steps at which `clock` ticks, increasing.
    pub fn dates(&self, clock: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.ticks_index(clock, i))
            .collect()
    }

    /// Number of ticks of every clock over the whole trace.
    pub fn tick_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.alphabet.len()];
        for &c in &self.ticks {
            counts[c as usize] += 1;
        }
        counts
    }
}

/// Streaming form of the history recurrence: one counter per clock.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistoryTracker {
    counts: Vec<u64>,
    step: u64,
}

impl HistoryTracker {
    pub fn new(clocks: usize) -> Self {
        HistoryTracker {
            counts: vec![0; clocks],
            step: 0,
        }
    }

    pub fn for_alphabet(alphabet: &Alphabet) -> Self {
        HistoryTracker::new(alphabet.len())
    }

    /// Moves from step `i` to `i + 1`, incrementing every ticking clock.
    pub fn advance(&mut self, ticks: &TickSet) -> Result<(), ClockError> {
        if let Some(max) = ticks.max() {
            if max >= self.counts.len() {
                return Err(ClockError::IndexOutOfRange {
                    index: max,
                    len: self.counts.len(),
                });
            }
        }
        for c in ticks.iter() {
            self.counts[c] += 1;
        }
        self.step += 1;
        Ok(())
    }

    /// `h_c(i)` at the current step `i`.
    pub fn history(&self, clock: usize) -> u64 {
        self.counts[clock]
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}
