//! Clifford unitaries as signed symplectic tableaus.
//!
//! A tableau stores, for each generator `X_q` and `Z_q`, the signed Pauli it is
//! conjugated to. Conjugating any other Pauli is a product of those images.

use std::fmt;

use crate::error::{Error, Result};
use crate::pauli::{check_qubits, product_phase, symplectic_product, PauliOperator};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CliffordTableau {
    n_qubits: usize,
    /// `images[q]` is the image of `X_q`, `images[n + q]` the image of `Z_q`.
    images: Vec<PauliOperator>,
}

impl CliffordTableau {
    pub fn identity(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let n = n_qubits;
        let mut images = Vec::with_capacity(2 * n);
        for q in 0..n {
            images.push(PauliOperator::from_parts(n, 1 << q, 0, false));
        }
        for q in 0..n {
            images.push(PauliOperator::from_parts(n, 0, 1 << q, false));
        }
        Ok(Self { n_qubits, images })
    }

    /// Builds a tableau from the images of `X_0..X_{n-1}` and `Z_0..Z_{n-1}`,
    /// checking the symplectic condition.
    pub fn from_images(x_images: Vec<PauliOperator>, z_images: Vec<PauliOperator>) -> Result<Self> {
        let n = x_images.len();
        check_qubits(n)?;
        if z_images.len() != n {
            return Err(Error::InvalidTableau(format!(
                "{} X images but {} Z images",
                n,
                z_images.len()
            )));
        }
        if let Some(bad) = x_images.iter().chain(&z_images).find(|p| p.n_qubits() != n) {
            return Err(Error::SizeMismatch {
                left: n,
                right: bad.n_qubits(),
            });
        }
        let mut images = x_images;
        images.extend(z_images);
        let t = Self { n_qubits: n, images };
        t.check_symplectic()?;
        Ok(t)
    }

    fn check_symplectic(&self) -> Result<()> {
        let n = self.n_qubits;
        for a in 0..2 * n {
            for b in (a + 1)..2 * n {
                let expect_anti = b == a + n;
                let anti = !self.images[a].commutes_unchecked(&self.images[b]);
                if anti != expect_anti {
                    return Err(Error::InvalidTableau(format!(
                        "images of generators {a} and {b} have the wrong commutation relation"
                    )));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_image(&self, qubit: usize) -> PauliOperator {
        self.images[qubit]
    }

    pub fn z_image(&self, qubit: usize) -> PauliOperator {
        self.images[self.n_qubits + qubit]
    }

    pub fn is_identity(&self) -> bool {
        let n = self.n_qubits;
        self.images.iter().enumerate().all(|(i, p)| {
            !p.is_negative()
                && if i < n {
                    p.x_bits() == 1 << i && p.z_bits() == 0
                } else {
                    p.x_bits() == 0 && p.z_bits() == 1 << (i - n)
                }
        })
    }

    /// Signed conjugate `U P U†`.
    pub fn apply(&self, p: &PauliOperator) -> Result<PauliOperator> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch {
                left: self.n_qubits,
                right: p.n_qubits(),
            });
        }
        Ok(self.apply_unchecked(p))
    }

    /// A letter string is `i^{|x&z|} X^x Z^z`, so its image is the ordered
    /// product of the X images followed by the Z images, times that phase.
    pub(crate) fn apply_unchecked(&self, p: &PauliOperator) -> PauliOperator {
        let n = self.n_qubits;
        let mut k = (p.x_bits() & p.z_bits()).count_ones() + if p.is_negative() { 2 } else { 0 };
        let (mut ax, mut az) = (0u32, 0u32);
        let mut fold = |img: &PauliOperator| {
            k += product_phase(ax, az, img.x_bits(), img.z_bits());
            if img.is_negative() {
                k += 2;
            }
            ax ^= img.x_bits();
            az ^= img.z_bits();
        };
        let mut bits = p.x_bits();
        while bits != 0 {
            let q = bits.trailing_zeros() as usize;
            fold(&self.images[q]);
            bits &= bits - 1;
        }
        let mut bits = p.z_bits();
        while bits != 0 {
            let q = bits.trailing_zeros() as usize;
            fold(&self.images[n + q]);
            bits &= bits - 1;
        }
        debug_assert!(k.is_multiple_of(2), "conjugate of a Hermitian Pauli must be Hermitian");
        PauliOperator::from_parts(n, ax, az, k & 3 == 2)
    }

    /// Only the letters of the image, skipping phase bookkeeping.
    #[inline]
    pub(crate) fn apply_unsigned_bits(&self, x: u32, z: u32) -> (u32, u32) {
        let n = self.n_qubits;
        let (mut ax, mut az) = (0u32, 0u32);
        let mut bits = x;
        while bits != 0 {
            let img = &self.images[bits.trailing_zeros() as usize];
            ax ^= img.x_bits();
            az ^= img.z_bits();
            bits &= bits - 1;
        }
        let mut bits = z;
        while bits != 0 {
            let img = &self.images[n + bits.trailing_zeros() as usize];
            ax ^= img.x_bits();
            az ^= img.z_bits();
            bits &= bits - 1;
        }
        (ax, az)
    }

    /// `a ∘ b`: applies `b` first, then `a` (the unitary `U_a U_b`).
    pub fn compose(a: &Self, b: &Self) -> Result<Self> {
        if a.n_qubits != b.n_qubits {
            return Err(Error::SizeMismatch {
                left: a.n_qubits,
                right: b.n_qubits,
            });
        }
        Ok(Self {
            n_qubits: a.n_qubits,
            images: b.images.iter().map(|p| a.apply_unchecked(p)).collect(),
        })
    }

    /// Exact inverse, signs included.
    pub fn inverse(&self) -> Self {
        let n = self.n_qubits;
        // Preimage of e: its X_r bit is <e, img(Z_r)> and its Z_r bit is <e, img(X_r)>.
        let preimage = |ex: u32, ez: u32| -> PauliOperator {
            let (mut x, mut z) = (0u32, 0u32);
            for r in 0..n {
                let xi = &self.images[r];
                let zi = &self.images[n + r];
                x |= symplectic_product(ex, ez, zi.x_bits(), zi.z_bits()) << r;
                z |= symplectic_product(ex, ez, xi.x_bits(), xi.z_bits()) << r;
            }
            let q = PauliOperator::from_parts(n, x, z, false);
            // t(q) = ±e, so flipping q by that sign makes t(q) = +e.
            let forward = self.apply_unchecked(&q);
            debug_assert_eq!((forward.x_bits(), forward.z_bits()), (ex, ez));
            if forward.is_negative() {
                q.negated()
            } else {
                q
            }
        };
        let mut images = Vec::with_capacity(2 * n);
        for q in 0..n {
            images.push(preimage(1 << q, 0));
        }
        for q in 0..n {
            images.push(preimage(0, 1 << q));
        }
        Self { n_qubits: n, images }
    }

    /// Permutation of canonical Pauli indices induced by unsigned conjugation.
    pub fn unsigned_permutation(&self) -> Vec<u32> {
        let n = self.n_qubits;
        let m = (1u32 << n) - 1;
        (0..1usize << (2 * n))
            .map(|i| {
                let (x, z) = self.apply_unsigned_bits((i >> n) as u32, i as u32 & m);
                ((x as usize) << n | z as usize) as u32
            })
            .collect()
    }
}

impl fmt::Display for CliffordTableau {
    /// One line per generator, e.g. `X0 -> +XZ`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n_qubits;
        for (i, img) in self.images.iter().enumerate() {
            let (letter, q) = if i < n { ('X', i) } else { ('Z', i - n) };
            let sign = if img.is_negative() { '-' } else { '+' };
            writeln!(f, "{letter}{q} -> {sign}{}", img.unsigned())?;
        }
        Ok(())
    }
}

impl fmt::Debug for CliffordTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.to_string().lines().map(str::to_owned).collect();
        write!(f, "Tableau[{}]", parts.join(", "))
    }
}

impl std::str::FromStr for CliffordTableau {
    type Err = Error;

    /// Parses the line format produced by `Display`. Every generator must appear once.
    fn from_str(s: &str) -> Result<Self> {
        let lines: Vec<&str> = s.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        if lines.is_empty() || !lines.len().is_multiple_of(2) {
            return Err(Error::InvalidTableau(format!(
                "expected 2n generator lines, got {}",
                lines.len()
            )));
        }
        let n = lines.len() / 2;
        let mut slots: Vec<Option<PauliOperator>> = vec![None; 2 * n];
        for line in lines {
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| Error::InvalidTableau(format!("missing '->' in {line:?}")))?;
            let lhs = lhs.trim();
            let mut chars = lhs.chars();
            let offset = match chars.next() {
                Some('X') => 0,
                Some('Z') => n,
                _ => return Err(Error::InvalidTableau(format!("bad generator {lhs:?}"))),
            };
            let q: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::InvalidTableau(format!("bad qubit index in {lhs:?}")))?;
            if q >= n {
                return Err(Error::InvalidTableau(format!("qubit {q} out of range")));
            }
            let img: PauliOperator = rhs.trim().parse()?;
            if img.n_qubits() != n {
                return Err(Error::SizeMismatch {
                    left: n,
                    right: img.n_qubits(),
                });
            }
            if slots[offset + q].replace(img).is_some() {
                return Err(Error::InvalidTableau(format!("duplicate line for {lhs}")));
            }
        }
        let images: Vec<PauliOperator> = slots.into_iter().map(Option::unwrap).collect();
        let z = images[n..].to_vec();
        let x = images[..n].to_vec();
        Self::from_images(x, z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::Gate;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    fn gate(g: Gate, n: usize) -> CliffordTableau {
        g.tableau(n).unwrap()
    }

    #[test]
    fn hadamard_and_cnot_images() {
        let h = gate(Gate::H(0), 1);
        assert_eq!(h.apply(&p("X")).unwrap(), p("Z"));
        assert_eq!(h.apply(&p("Y")).unwrap(), p("-Y"));
        let cx = gate(Gate::Cnot { control: 0, target: 1 }, 2);
        assert_eq!(cx.apply(&p("XI")).unwrap(), p("XX"));
        assert_eq!(cx.apply(&p("XZ")).unwrap(), p("-YY"));
    }

    #[test]
    fn involutions_compose_to_identity() {
        let h = gate(Gate::H(0), 1);
        assert!(CliffordTableau::compose(&h, &h).unwrap().is_identity());
        let cx = gate(Gate::Cnot { control: 0, target: 1 }, 2);
        assert!(CliffordTableau::compose(&cx, &cx).unwrap().is_identity());
        let id = CliffordTableau::identity(2).unwrap();
        assert_eq!(CliffordTableau::compose(&id, &cx).unwrap(), cx);
        assert_eq!(h.inverse(), h);
    }

    #[test]
    fn inverse_of_phase_gate() {
        let s = gate(Gate::S(0), 1);
        assert_eq!(s.apply(&p("X")).unwrap(), p("Y"));
        assert_eq!(s.inverse().apply(&p("X")).unwrap(), p("-Y"));
        assert!(CliffordTableau::compose(&s.inverse(), &s).unwrap().is_identity());
    }

    #[test]
    fn text_round_trip() {
        let cx = gate(Gate::Cnot { control: 0, target: 1 }, 2);
        let text = cx.to_string();
        assert_eq!(text, "X0 -> +XX\nX1 -> +IX\nZ0 -> +ZI\nZ1 -> +ZZ\n");
        assert_eq!(text.parse::<CliffordTableau>().unwrap(), cx);
        let y = gate(Gate::Y(1), 2);
        assert!(y.to_string().contains("Z1 -> -IZ"));
    }

    #[test]
    fn rejects_non_symplectic() {
        let err = CliffordTableau::from_images(vec![p("X")], vec![p("X")]);
        assert!(matches!(err, Err(Error::InvalidTableau(_))));
        assert!("X0 -> +Z\nZ0 -> +Z".parse::<CliffordTableau>().is_err());
    }

    #[test]
    fn size_mismatch() {
        let h = gate(Gate::H(0), 1);
        assert!(h.apply(&p("XX")).is_err());
        assert!(CliffordTableau::compose(&h, &CliffordTableau::identity(2).unwrap()).is_err());
    }
}
