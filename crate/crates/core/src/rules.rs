use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub feature: usize,
    pub value: bool,
}

impl Literal {
    pub fn new(feature: usize, value: bool) -> Self {
        Literal { feature, value }
    }
}

/// Conjunction of literals, sorted by feature, each feature at most once.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Term {
    literals: Vec<Literal>,
}

impl Term {
    pub fn new<I: IntoIterator<Item = Literal>>(literals: I) -> Result<Self> {
        let mut literals: Vec<Literal> = literals.into_iter().collect();
        literals.sort();
        literals.dedup();
        for w in literals.windows(2) {
            if w[0].feature == w[1].feature {
                return Err(Error::ContradictoryTerm(w[0].feature));
            }
        }
        Ok(Term { literals })
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, bool)>>(pairs: I) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(f, v)| Literal::new(f, v)))
    }

    pub fn empty() -> Self {
        Term::default()
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn applies(&self, e: &[bool]) -> bool {
        self.literals.iter().all(|l| e[l.feature] == l.value)
    }

    pub fn value_of(&self, feature: usize) -> Option<bool> {
        self.literals
            .binary_search_by_key(&feature, |l| l.feature)
            .ok()
            .map(|i| self.literals[i].value)
    }

    pub fn features(&self) -> impl Iterator<Item = usize> + '_ {
        self.literals.iter().map(|l| l.feature)
    }

    /// Features on which `e` violates the term, sorted.
    pub fn conflicts(&self, e: &[bool]) -> Vec<usize> {
        self.literals
            .iter()
            .filter(|l| e[l.feature] != l.value)
            .map(|l| l.feature)
            .collect()
    }

    fn max_feature(&self) -> Option<usize> {
        self.literals.last().map(|l| l.feature)
    }
}

/// Unordered terms plus a default class: `1 - default` if some term
/// applies, `default` otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionSet {
    terms: Vec<Term>,
    default: bool,
}

impl DecisionSet {
    pub fn new(terms: Vec<Term>, default: bool) -> Self {
        DecisionSet { terms, default }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn default_class(&self) -> bool {
        self.default
    }

    pub fn classify(&self, e: &[bool]) -> bool {
        if self.terms.iter().any(|t| t.applies(e)) {
            !self.default
        } else {
            self.default
        }
    }

    /// Sum of term sizes plus one for the default rule.
    pub fn size(&self) -> usize {
        self.terms.iter().map(Term::len).sum::<usize>() + 1
    }

    pub fn term_size(&self) -> usize {
        self.terms.iter().map(Term::len).max().unwrap_or(0)
    }

    /// Flipping the default flips the class of every example.
    pub fn negated(&self) -> DecisionSet {
        DecisionSet {
            terms: self.terms.clone(),
            default: !self.default,
        }
    }

    pub(crate) fn max_feature(&self) -> Option<usize> {
        self.terms.iter().filter_map(Term::max_feature).max()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub term: Term,
    pub class: bool,
}

impl Rule {
    pub fn new(term: Term, class: bool) -> Self {
        Rule { term, class }
    }
}

/// Ordered rules; the first rule whose term applies decides. The last term
/// is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionList {
    rules: Vec<Rule>,
}

impl DecisionList {
    pub fn new(rules: Vec<Rule>) -> Result<Self> {
        match rules.last() {
            None => Err(Error::InvalidList("no rules".into())),
            Some(r) if !r.term.is_empty() => Err(Error::InvalidList(
                "last rule must have an empty term".into(),
            )),
            Some(_) => Ok(DecisionList { rules }),
        }
    }

    pub fn constant(class: bool) -> Self {
        DecisionList {
            rules: vec![Rule::new(Term::empty(), class)],
        }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the first rule whose term applies to `e`.
    pub fn rule_of(&self, e: &[bool]) -> usize {
        self.rules
            .iter()
            .position(|r| r.term.applies(e))
            .expect("last rule is empty")
    }

    pub fn classify(&self, e: &[bool]) -> bool {
        self.rules[self.rule_of(e)].class
    }

    /// Sum over rules of term size plus one.
    pub fn size(&self) -> usize {
        self.rules.iter().map(|r| r.term.len() + 1).sum()
    }

    pub fn term_size(&self) -> usize {
        self.rules.iter().map(|r| r.term.len()).max().unwrap_or(0)
    }

    pub fn negated(&self) -> DecisionList {
        DecisionList {
            rules: self
                .rules
                .iter()
                .map(|r| Rule::new(r.term.clone(), !r.class))
                .collect(),
        }
    }

    pub(crate) fn max_feature(&self) -> Option<usize> {
        self.rules.iter().filter_map(|r| r.term.max_feature()).max()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contradictory_term_rejected() {
        assert!(matches!(
            Term::from_pairs([(0, true), (0, false)]),
            Err(Error::ContradictoryTerm(0))
        ));
        let t = Term::from_pairs([(2, true), (0, false), (2, true)]).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.value_of(2), Some(true));
        assert_eq!(t.value_of(1), None);
    }

    #[test]
    fn list_needs_empty_last_term() {
        assert!(DecisionList::new(vec![]).is_err());
        let t = Term::from_pairs([(0, true)]).unwrap();
        assert!(DecisionList::new(vec![Rule::new(t, true)]).is_err());
    }

    #[test]
    fn set_semantics() {
        let s = DecisionSet::new(
            vec![Term::from_pairs([(0, true), (1, true)]).unwrap()],
            false,
        );
        assert!(s.classify(&[true, true]));
        assert!(!s.classify(&[true, false]));
        assert_eq!(s.size(), 3);
        assert_eq!(DecisionSet::new(vec![], true).size(), 1);
    }
}
