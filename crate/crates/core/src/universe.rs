use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Ordered set of named binary features. Feature `i` is the `i`-th name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureUniverse {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl FeatureUniverse {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateFeature(name.clone()));
            }
        }
        Ok(FeatureUniverse { names, index })
    }

    /// Universe `f0, f1, ..., f{n-1}`.
    pub fn indexed(n: usize) -> Self {
        Self::new((0..n).map(|i| format!("f{i}"))).expect("generated names are distinct")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownFeature(name.to_string()))
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::FeatureOutOfRange {
                index: i,
                len: self.len(),
            })
        }
    }
}

/// Total assignment of the features of a universe.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Example {
    bits: Vec<bool>,
}

impl Example {
    pub fn new(bits: Vec<bool>) -> Self {
        Example { bits }
    }

    pub fn zeros(n: usize) -> Self {
        Example {
            bits: vec![false; n],
        }
    }

    /// Bit `i` of `mask` becomes feature `i`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Example {
            bits: (0..n).map(|i| (mask >> i) & 1 == 1).collect(),
        }
    }

    pub fn to_mask(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |m, (i, &b)| if b { m | (1 << i) } else { m })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// `e_A`: the example with every feature of `set` flipped.
    pub fn flipped(&self, set: &[usize]) -> Example {
        let mut bits = self.bits.clone();
        for &f in set {
            bits[f] = !bits[f];
        }
        Example { bits }
    }

    /// Restriction of the example to `set`.
    pub fn restrict(&self, set: &[usize]) -> PartialExample {
        let mut p = PartialExample::empty(self.len());
        for &f in set {
            p.values[f] = Some(self.bits[f]);
        }
        p
    }

    pub fn as_partial(&self) -> PartialExample {
        PartialExample {
            values: self.bits.iter().map(|&b| Some(b)).collect(),
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", b as u8)?;
        }
        Ok(())
    }
}

/// Assignment of some of the features of a universe.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialExample {
    values: Vec<Option<bool>>,
}

impl PartialExample {
    pub fn empty(n: usize) -> Self {
        PartialExample {
            values: vec![None; n],
        }
    }

    pub fn from_pairs<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, bool)>,
    {
        let mut p = Self::empty(n);
        for (f, b) in pairs {
            if f >= n {
                return Err(Error::FeatureOutOfRange { index: f, len: n });
            }
            if p.values[f].is_some() {
                return Err(Error::DoubleAssignment(f));
            }
            p.values[f] = Some(b);
        }
        Ok(p)
    }

    /// Universe size.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, f: usize) -> Option<bool> {
        self.values[f]
    }

    pub fn assign(&mut self, f: usize, b: bool) {
        self.values[f] = Some(b);
    }

    pub fn unassign(&mut self, f: usize) {
        self.values[f] = None;
    }

    pub fn without(&self, f: usize) -> PartialExample {
        let mut p = self.clone();
        p.values[f] = None;
        p
    }

    /// Number of assigned features.
    pub fn size(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Assigned features in index order.
    pub fn domain(&self) -> Vec<usize> {
        self.assigned().map(|(f, _)| f).collect()
    }

    pub fn assigned(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(f, v)| v.map(|b| (f, b)))
    }

    pub fn free(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&f| self.values[f].is_none())
            .collect()
    }

    pub fn agrees_with(&self, e: &Example) -> bool {
        self.assigned().all(|(f, b)| e.get(f) == b)
    }

    /// Fill unassigned features from `base`.
    pub fn complete_with(&self, base: &Example) -> Example {
        Example::new(
            self.values
                .iter()
                .enumerate()
                .map(|(f, v)| v.unwrap_or(base.get(f)))
                .collect(),
        )
    }
}

impl fmt::Display for PartialExample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.values {
            match v {
                Some(b) => write!(f, "{}", *b as u8)?,
                None => write!(f, "*")?,
            }
        }
        Ok(())
    }
}
