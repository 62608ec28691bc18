//! Generator sets for the four gate groups and bounded group enumeration.
//!
//! Sign conventions for the single- and two-qubit generators:
//!
//! | gate        | X image          | Z image          |
//! |-------------|------------------|------------------|
//! | `X_q`       | `+X_q`           | `-Z_q`           |
//! | `Y_q`       | `-X_q`           | `-Z_q`           |
//! | `Z_q`       | `-X_q`           | `+Z_q`           |
//! | `H_q`       | `+Z_q`           | `+X_q`           |
//! | `S_q`       | `+Y_q`           | `+Z_q`           |
//! | `CNOT_{c,t}`| `X_c -> +X_c X_t`, `X_t -> +X_t` | `Z_c -> +Z_c`, `Z_t -> +Z_c Z_t` |
//!
//! `S = diag(1, i)` and `H` maps `Y -> -Y`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{check_qubits, PauliOperator};
use crate::tableau::CliffordTableau;

/// Default cap on the number of group elements produced by [`enumerate_group`].
pub const DEFAULT_GROUP_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupName {
    #[serde(alias = "PAULI")]
    Pauli,
    #[serde(alias = "CNOT_PAULI", alias = "cnot_pauli")]
    CnotPauli,
    #[serde(alias = "REAL_CLIFFORD", alias = "real-clifford", alias = "real_clifford")]
    Real,
    #[serde(alias = "FULL_CLIFFORD", alias = "full-clifford", alias = "full_clifford")]
    Full,
}

impl GroupName {
    pub const ALL: [GroupName; 4] = [
        GroupName::Pauli,
        GroupName::CnotPauli,
        GroupName::Real,
        GroupName::Full,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GroupName::Pauli => "pauli",
            GroupName::CnotPauli => "cnot-pauli",
            GroupName::Real => "real",
            GroupName::Full => "full",
        }
    }
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GroupName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "pauli" => Ok(GroupName::Pauli),
            "cnot-pauli" | "cnotpauli" | "cnot" => Ok(GroupName::CnotPauli),
            "real" | "real-clifford" => Ok(GroupName::Real),
            "full" | "full-clifford" | "clifford" => Ok(GroupName::Full),
            _ => Err(Error::UnsupportedGroup(s.to_owned())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    X(usize),
    Y(usize),
    Z(usize),
    H(usize),
    S(usize),
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn tableau(self, n_qubits: usize) -> Result<CliffordTableau> {
        let n = n_qubits;
        let check = |q: usize| {
            if q >= n {
                Err(Error::InvalidTableau(format!("gate qubit {q} out of range for {n} qubits")))
            } else {
                Ok(())
            }
        };
        let pauli = |x: u32, z: u32, neg: bool| PauliOperator::new(n, x, z, neg);
        let mut xs: Vec<PauliOperator> = (0..n).map(|q| pauli(1 << q, 0, false)).collect::<Result<_>>()?;
        let mut zs: Vec<PauliOperator> = (0..n).map(|q| pauli(0, 1 << q, false)).collect::<Result<_>>()?;
        match self {
            Gate::X(q) => {
                check(q)?;
                zs[q] = zs[q].negated();
            }
            Gate::Y(q) => {
                check(q)?;
                xs[q] = xs[q].negated();
                zs[q] = zs[q].negated();
            }
            Gate::Z(q) => {
                check(q)?;
                xs[q] = xs[q].negated();
            }
            Gate::H(q) => {
                check(q)?;
                std::mem::swap(&mut xs[q], &mut zs[q]);
            }
            Gate::S(q) => {
                check(q)?;
                xs[q] = pauli(1 << q, 1 << q, false)?;
            }
            Gate::Cnot { control, target } => {
                check(control)?;
                check(target)?;
                if control == target {
                    return Err(Error::InvalidTableau("CNOT control equals target".into()));
                }
                xs[control] = pauli((1 << control) | (1 << target), 0, false)?;
                zs[target] = pauli(0, (1 << control) | (1 << target), false)?;
            }
        }
        CliffordTableau::from_images(xs, zs)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::X(q) => write!(f, "X{q}"),
            Gate::Y(q) => write!(f, "Y{q}"),
            Gate::Z(q) => write!(f, "Z{q}"),
            Gate::H(q) => write!(f, "H{q}"),
            Gate::S(q) => write!(f, "S{q}"),
            Gate::Cnot { control, target } => write!(f, "CNOT{control}{target}"),
        }
    }
}

/// The named generators of one of the four groups on `n` qubits, with their tableaus.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    name: GroupName,
    n_qubits: usize,
    gates: Vec<Gate>,
    tableaus: Vec<CliffordTableau>,
}

impl GeneratorSet {
    pub fn new(name: GroupName, n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let n = n_qubits;
        let mut gates = Vec::new();
        for q in 0..n {
            gates.extend([Gate::X(q), Gate::Y(q), Gate::Z(q)]);
        }
        if name != GroupName::Pauli {
            for c in 0..n {
                for t in 0..n {
                    if c != t {
                        gates.push(Gate::Cnot { control: c, target: t });
                    }
                }
            }
        }
        if matches!(name, GroupName::Real | GroupName::Full) {
            gates.extend((0..n).map(Gate::H));
        }
        if name == GroupName::Full {
            gates.extend((0..n).map(Gate::S));
        }
        let tableaus = gates.iter().map(|g| g.tableau(n)).collect::<Result<_>>()?;
        Ok(Self {
            name,
            n_qubits,
            gates,
            tableaus,
        })
    }

    pub fn name(&self) -> GroupName {
        self.name
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn tableaus(&self) -> &[CliffordTableau] {
        &self.tableaus
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Product of `word_length` uniformly chosen generators.
    pub fn random_word<R: Rng + ?Sized>(&self, word_length: usize, rng: &mut R) -> CliffordTableau {
        let mut acc = CliffordTableau::identity(self.n_qubits).expect("validated qubit count");
        for _ in 0..word_length {
            let g = &self.tableaus[rng.random_range(0..self.tableaus.len())];
            acc = CliffordTableau::compose(g, &acc).expect("same qubit count");
        }
        acc
    }
}

/// Every element of a generated group, deduplicated on the signed tableau.
#[derive(Debug, Clone)]
pub struct CliffordGroup {
    name: GroupName,
    n_qubits: usize,
    elements: Vec<CliffordTableau>,
}

impl CliffordGroup {
    pub fn name(&self) -> GroupName {
        self.name
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn elements(&self) -> &[CliffordTableau] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// For each element (same order as [`elements`](Self::elements)), the
    /// permutation `σ` with `U P_μ U† = ± P_σ(μ)` over canonical indices.
    pub fn unsigned_action_index(&self) -> ActionIndex {
        ActionIndex {
            n_qubits: self.n_qubits,
            permutations: self.elements.iter().map(|t| t.unsigned_permutation()).collect(),
        }
    }

    /// Number of distinct unsigned conjugation actions (the group modulo Paulis).
    pub fn distinct_unsigned_actions(&self) -> usize {
        let set: HashSet<Vec<u32>> = self.elements.iter().map(|t| t.unsigned_permutation()).collect();
        set.len()
    }
}

#[derive(Debug, Clone)]
pub struct ActionIndex {
    pub n_qubits: usize,
    pub permutations: Vec<Vec<u32>>,
}

impl ActionIndex {
    pub fn len(&self) -> usize {
        self.permutations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutations.is_empty()
    }
}

/// BFS closure of the generators, starting at the identity.
///
/// Fails with [`Error::CapExceeded`] as soon as more than `cap` distinct
/// elements have been found.
pub fn enumerate_group(generators: &GeneratorSet, cap: usize) -> Result<CliffordGroup> {
    let n = generators.n_qubits();
    let identity = CliffordTableau::identity(n)?;
    let mut seen: HashMap<CliffordTableau, usize> = HashMap::new();
    let mut elements = vec![identity.clone()];
    seen.insert(identity, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in generators.tableaus() {
            let next = CliffordTableau::compose(g, &elements[i])?;
            if seen.contains_key(&next) {
                continue;
            }
            if elements.len() >= cap {
                return Err(Error::CapExceeded {
                    what: "group enumeration",
                    cap,
                    reached: elements.len() + 1,
                });
            }
            seen.insert(next.clone(), elements.len());
            queue.push_back(elements.len());
            elements.push(next);
        }
    }
    Ok(CliffordGroup {
        name: generators.name(),
        n_qubits: n,
        elements,
    })
}
