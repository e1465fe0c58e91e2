//! Finite groups given by Cayley tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// On-disk group description: `table[g][h]` is the index of `g·h`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupSpec {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
}

/// Index of a conjugacy class; classes are numbered by their smallest element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConjClass(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl FiniteGroup {
    /// Validates a Cayley table: closure, identity, inverses and associativity.
    pub fn build(spec: &GroupSpec) -> Result<Self> {
        let n = spec.order;
        if n == 0 {
            return Err(Error::InvalidGroup("order must be positive".into()));
        }
        if spec.table.len() != n || spec.table.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidGroup(format!("table must be {n}×{n}")));
        }
        if spec.table.iter().flatten().any(|&v| v >= n) {
            return Err(Error::InvalidGroup(format!("table entries must be below {n}")));
        }
        let e = spec.identity;
        if e >= n {
            return Err(Error::InvalidGroup(format!("identity {e} out of range")));
        }
        let t = &spec.table;
        if (0..n).any(|g| t[e][g] != g || t[g][e] != g) {
            return Err(Error::InvalidGroup(format!("{e} is not an identity")));
        }
        let mut inverse = vec![0; n];
        for g in 0..n {
            inverse[g] = (0..n)
                .find(|&h| t[g][h] == e && t[h][g] == e)
                .ok_or_else(|| Error::InvalidGroup(format!("element {g} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if t[t[a][b]][c] != t[a][t[b][c]] {
                        return Err(Error::InvalidGroup(format!("not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }

        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for g in 0..n {
            if class_of[g] != usize::MAX {
                continue;
            }
            let mut class: Vec<usize> = (0..n).map(|k| t[t[k][g]][inverse[k]]).collect();
            class.sort_unstable();
            class.dedup();
            for &h in &class {
                class_of[h] = classes.len();
            }
            classes.push(class);
        }
        Ok(FiniteGroup { table: spec.table.clone(), identity: e, inverse, classes, class_of })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::build(&serde_json::from_str(text)?)
    }

    pub fn to_spec(&self) -> GroupSpec {
        GroupSpec { order: self.order(), table: self.table.clone(), identity: self.identity }
    }

    /// ℤ/n with elements `0..n` and identity 0.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::build(&GroupSpec { order: n, table, identity: 0 }).expect("cyclic group table")
    }

    /// S₃ as permutations of {0,1,2}, listed in lexicographic order; 0 is the identity.
    pub fn s3() -> Self {
        let perms: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        // (a·b)(i) = a(b(i))
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect())
            .collect();
        Self::build(&GroupSpec { order: 6, table, identity: 0 }).expect("S3 table")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// `a·b·a⁻¹`.
    pub fn conjugate(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(a, b), self.inv(a))
    }

    pub fn class_of(&self, g: usize) -> ConjClass {
        ConjClass(self.class_of[g])
    }

    pub fn identity_class(&self) -> ConjClass {
        self.class_of(self.identity)
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_members(&self, c: ConjClass) -> &[usize] {
        &self.classes[c.0]
    }
}

/// A non-negative function constant on conjugacy classes with `Φ(ι) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassFunction {
    values: Vec<f64>,
}

impl ClassFunction {
    pub fn new(group: &FiniteGroup, values: Vec<f64>) -> Result<Self> {
        if values.len() != group.classes().len() {
            return Err(Error::Domain(format!(
                "class function has {} values, group has {} classes",
                values.len(),
                group.classes().len()
            )));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Domain("class function must be non-negative".into()));
        }
        if values[group.identity_class().0] != 1.0 {
            return Err(Error::Domain("class function must equal 1 at the identity".into()));
        }
        Ok(ClassFunction { values })
    }

    /// `1_ι`.
    pub fn identity_indicator(group: &FiniteGroup) -> Self {
        let mut values = vec![0.0; group.classes().len()];
        values[group.identity_class().0] = 1.0;
        ClassFunction { values }
    }

    pub fn one(group: &FiniteGroup) -> Self {
        ClassFunction { values: vec![1.0; group.classes().len()] }
    }

    pub fn get(&self, c: ConjClass) -> f64 {
        self.values[c.0]
    }
}
