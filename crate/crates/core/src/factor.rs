//! Dense non-negative factors over discrete variables.
//!
//! Values are stored row-major over the scope, first scope variable slowest,
//! which matches the CPT row layout: a CPT's factor is its rows concatenated
//! with scope `parents ++ [child]`.

use crate::error::{BnError, Result};
use crate::network::{Evidence, Network};

#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    scope: Vec<String>,
    cards: Vec<usize>,
    values: Vec<f64>,
}

impl Factor {
    pub fn new(scope: Vec<String>, cards: Vec<usize>, values: Vec<f64>) -> Result<Factor> {
        if scope.len() != cards.len() {
            return Err(BnError::InvalidFactor(format!(
                "{} scope variables but {} cardinalities",
                scope.len(),
                cards.len()
            )));
        }
        for (i, v) in scope.iter().enumerate() {
            if scope[..i].contains(v) {
                return Err(BnError::InvalidFactor(format!("`{v}` repeated in scope")));
            }
        }
        let expected: usize = cards.iter().product();
        if values.len() != expected {
            return Err(BnError::InvalidFactor(format!(
                "{} values for a scope of size {expected}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(BnError::InvalidFactor(format!("value {bad} is negative or not finite")));
        }
        Ok(Factor { scope, cards, values })
    }

    /// The empty-scope factor holding `value`.
    pub fn scalar(value: f64) -> Factor {
        Factor {
            scope: Vec::new(),
            cards: Vec::new(),
            values: vec![value],
        }
    }

    /// Multiplicative identity.
    pub fn unit() -> Factor {
        Factor::scalar(1.0)
    }

    /// Encodes the CPT of variable `index`: scope is its parents followed by itself.
    pub fn from_cpt(network: &Network, index: usize) -> Factor {
        let cpt = network.cpt(index);
        let mut scope = cpt.parents.clone();
        scope.push(cpt.child.clone());
        let cards = network
            .parents(index)
            .iter()
            .chain(std::iter::once(&index))
            .map(|&i| network.cardinality(i))
            .collect();
        let values = cpt.rows.iter().flatten().copied().collect();
        Factor { scope, cards, values }
    }

    pub fn scope(&self) -> &[String] {
        &self.scope
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn contains(&self, variable: &str) -> bool {
        self.position(variable).is_some()
    }

    fn position(&self, variable: &str) -> Option<usize> {
        self.scope.iter().position(|v| v == variable)
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    fn strides(cards: &[usize]) -> Vec<usize> {
        let mut strides = vec![1; cards.len()];
        for i in (0..cards.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * cards[i + 1];
        }
        strides
    }

    /// Value at a full assignment of the scope, given in scope order.
    pub fn value_at(&self, states: &[usize]) -> f64 {
        let strides = Self::strides(&self.cards);
        let offset: usize = states.iter().zip(&strides).map(|(s, st)| s * st).sum();
        self.values[offset]
    }

    /// Pointwise product over the union scope (`self`'s order, then new variables of `other`).
    pub fn product(&self, other: &Factor) -> Result<Factor> {
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        for (v, &c) in other.scope.iter().zip(&other.cards) {
            match self.position(v) {
                Some(i) if self.cards[i] != c => {
                    return Err(BnError::StateSpaceMismatch {
                        variable: v.clone(),
                        left: self.cards[i],
                        right: c,
                    })
                }
                Some(_) => {}
                None => {
                    scope.push(v.clone());
                    cards.push(c);
                }
            }
        }

        // stride of each output coordinate within each operand (0 when absent)
        let a_strides = Self::strides(&self.cards);
        let b_strides = Self::strides(&other.cards);
        let a_map: Vec<usize> = scope
            .iter()
            .map(|v| self.position(v).map_or(0, |i| a_strides[i]))
            .collect();
        let b_map: Vec<usize> = scope
            .iter()
            .map(|v| other.position(v).map_or(0, |i| b_strides[i]))
            .collect();

        let size: usize = cards.iter().product();
        let mut values = Vec::with_capacity(size);
        let mut states = vec![0usize; cards.len()];
        let (mut ai, mut bi) = (0usize, 0usize);
        for _ in 0..size {
            values.push(self.values[ai] * other.values[bi]);
            // odometer increment, last coordinate fastest
            for d in (0..cards.len()).rev() {
                states[d] += 1;
                ai += a_map[d];
                bi += b_map[d];
                if states[d] < cards[d] {
                    break;
                }
                ai -= a_map[d] * cards[d];
                bi -= b_map[d] * cards[d];
                states[d] = 0;
            }
        }
        Ok(Factor { scope, cards, values })
    }

    /// Sums `variable` out of the factor.
    pub fn marginalize(&self, variable: &str) -> Result<Factor> {
        let pos = self
            .position(variable)
            .ok_or_else(|| BnError::NotInScope(variable.to_string()))?;
        let card = self.cards[pos];
        let inner: usize = self.cards[pos + 1..].iter().product();
        let outer: usize = self.cards[..pos].iter().product();
        let mut values = vec![0.0; outer * inner];
        for o in 0..outer {
            for s in 0..card {
                let base = (o * card + s) * inner;
                for i in 0..inner {
                    values[o * inner + i] += self.values[base + i];
                }
            }
        }
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(pos);
        cards.remove(pos);
        Ok(Factor { scope, cards, values })
    }

    /// Slices the factor at observed states given as `(variable id, state index)`.
    /// Observations on variables outside the scope are ignored.
    pub fn reduce(&self, observations: &[(&str, usize)]) -> Result<Factor> {
        let mut fixed: Vec<Option<usize>> = vec![None; self.scope.len()];
        for &(var, state) in observations {
            if let Some(pos) = self.position(var) {
                if state >= self.cards[pos] {
                    return Err(BnError::UnknownState {
                        variable: var.to_string(),
                        state: format!("#{state}"),
                    });
                }
                fixed[pos] = Some(state);
            }
        }
        if fixed.iter().all(Option::is_none) {
            return Ok(self.clone());
        }
        let strides = Self::strides(&self.cards);
        let base: usize = fixed
            .iter()
            .zip(&strides)
            .map(|(f, st)| f.map_or(0, |s| s * st))
            .sum();
        let free: Vec<usize> = (0..self.scope.len()).filter(|&i| fixed[i].is_none()).collect();
        let scope: Vec<String> = free.iter().map(|&i| self.scope[i].clone()).collect();
        let cards: Vec<usize> = free.iter().map(|&i| self.cards[i]).collect();
        let size: usize = cards.iter().product();
        let mut values = Vec::with_capacity(size);
        let mut states = vec![0usize; free.len()];
        for _ in 0..size {
            let offset: usize = base + states.iter().zip(&free).map(|(s, &i)| s * strides[i]).sum::<usize>();
            values.push(self.values[offset]);
            for d in (0..free.len()).rev() {
                states[d] += 1;
                if states[d] < cards[d] {
                    break;
                }
                states[d] = 0;
            }
        }
        Ok(Factor { scope, cards, values })
    }

    /// [`Factor::reduce`] with state names resolved against `network`.
    pub fn reduce_evidence(&self, network: &Network, evidence: &Evidence) -> Result<Factor> {
        let resolved = network.resolve(evidence)?;
        let observations: Vec<(&str, usize)> = resolved
            .iter()
            .map(|&(v, s)| (network.variable(v).id.as_str(), s))
            .collect();
        self.reduce(&observations)
    }
}
