use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{mod_inverse, ExactMatrix};
use crate::groups::GroupSpec;

pub const DEFAULT_CAP: usize = 1_000_000;

/// Residues of an `n×n` matrix mod `m`, row-major. Lexicographic order on
/// these slices equals the order of the big-endian byte encoding.
pub type Residues = Box<[u32]>;

pub(crate) fn mul_residues(a: &[u32], b: &[u32], n: usize, m: u64) -> Residues {
    let mut out = vec![0u32; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k] as u64;
            if aik == 0 {
                continue;
            }
            for j in 0..n {
                let idx = i * n + j;
                out[idx] = ((out[idx] as u64 + aik * b[k * n + j] as u64) % m) as u32;
            }
        }
    }
    out.into_boxed_slice()
}

/// Inverse of an upper-triangular residue matrix with unit diagonal entries.
pub(crate) fn inverse_residues(a: &[u32], n: usize, m: u64) -> Option<Residues> {
    let mut dinv = Vec::with_capacity(n);
    for i in 0..n {
        dinv.push(mod_inverse(a[i * n + i] as u64 % m, m)?);
    }
    let mut x = vec![0u64; n * n];
    for j in 0..n {
        x[j * n + j] = dinv[j];
        for i in (0..j).rev() {
            let mut acc = 0u64;
            for k in (i + 1)..=j {
                acc = (acc + a[i * n + k] as u64 * x[k * n + j]) % m;
            }
            x[i * n + j] = (m - dinv[i] * acc % m) % m;
        }
    }
    Some(x.into_iter().map(|v| v as u32).collect())
}

pub(crate) fn residues_of(g: &ExactMatrix, m: u64) -> Result<Residues> {
    let r = g.reduce_mod(m)?;
    Ok(r.residues().expect("reduced matrix has residues").into_boxed_slice())
}

fn identity_residues(n: usize, m: u64) -> Residues {
    let mut v = vec![0u32; n * n];
    if m > 1 {
        for i in 0..n {
            v[i * n + i] = 1;
        }
    }
    v.into_boxed_slice()
}

/// A fully enumerated congruence quotient `G → G_m` together with the image
/// of the central subgroup and a canonical transversal for it.
#[derive(Debug)]
pub struct FiniteQuotient {
    group: Arc<GroupSpec>,
    modulus: u64,
    n: usize,
    elements: Vec<Residues>,
    index: HashMap<Residues, u32>,
    generator_images: Vec<(String, u32)>,
    center_generator_images: Vec<(String, u32)>,
    center_image: Vec<u32>,
    /// Position of an element inside `center_image`, `u32::MAX` if outside.
    center_position: Vec<u32>,
    transversal: Vec<u32>,
    coset_of: Vec<u32>,
    /// `e = transversal[coset_of[e]] · center_image[center_offset[e]]`.
    center_offset: Vec<u32>,
    /// False when only the image of `C` was enumerated.
    full: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct QuotientSummary {
    pub group: String,
    pub modulus: u64,
    pub order: usize,
    pub center_image_order: usize,
    pub transversal_size: usize,
    pub generator_images: Vec<(String, usize)>,
}

/// Breadth-first enumeration of the image of `group` in `GL_n(Z/m)`.
pub fn enumerate_quotient(group: &Arc<GroupSpec>, m: u64, cap: usize) -> Result<FiniteQuotient> {
    let steps: Vec<&ExactMatrix> = group.generators_and_inverses().collect();
    enumerate_from(group, m, cap, &steps, true)
}

/// The image of `C` in `G_m` as a finite group in its own right; the rest of
/// `G_m` is not enumerated, so it carries no generator images of `G`.
pub fn enumerate_center_quotient(group: &Arc<GroupSpec>, m: u64, cap: usize) -> Result<FiniteQuotient> {
    let steps: Vec<&ExactMatrix> = group.center().generators.iter().map(|g| &g.matrix).collect();
    enumerate_from(group, m, cap, &steps, false)
}

fn enumerate_from(group: &Arc<GroupSpec>, m: u64, cap: usize, steps: &[&ExactMatrix], full: bool) -> Result<FiniteQuotient> {
    if m == 0 {
        return Err(Error::Parse("modulus must be at least 1".into()));
    }
    let n = group.dim();
    let steps: Vec<Residues> = steps.iter().map(|g| residues_of(g, m)).collect::<Result<_>>()?;
    let id = identity_residues(n, m);
    let mut elements = vec![id.clone()];
    let mut index = HashMap::from([(id, 0u32)]);
    let mut queue = VecDeque::from([0u32]);
    while let Some(cur) = queue.pop_front() {
        for s in &steps {
            let next = mul_residues(&elements[cur as usize], s, n, m);
            if index.contains_key(&next) {
                continue;
            }
            if elements.len() >= cap {
                return Err(Error::CapExceeded { modulus: m, cap });
            }
            let idx = elements.len() as u32;
            index.insert(next.clone(), idx);
            elements.push(next);
            queue.push_back(idx);
        }
    }

    let lookup = |g: &ExactMatrix, label: &str| -> Result<u32> {
        let r = residues_of(g, m)?;
        index.get(&r).copied().ok_or_else(|| Error::InvalidGroup(format!("`{label}` is not in the group generated by the generators")))
    };
    let generator_images = if full {
        group.generators().iter().map(|g| Ok((g.name.clone(), lookup(&g.matrix, &g.name)?))).collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let center_generator_images =
        group.center().generators.iter().map(|g| Ok((g.name.clone(), lookup(&g.matrix, &g.name)?))).collect::<Result<Vec<_>>>()?;

    let mut q = FiniteQuotient {
        group: Arc::clone(group),
        modulus: m,
        n,
        elements,
        index,
        generator_images,
        center_generator_images,
        center_image: Vec::new(),
        center_position: Vec::new(),
        transversal: Vec::new(),
        coset_of: Vec::new(),
        center_offset: Vec::new(),
        full,
    };
    let cgens: Vec<u32> = q.center_generator_images.iter().map(|(_, i)| *i).collect();
    q.center_image = q.subgroup_closure(&cgens);
    q.center_position = vec![u32::MAX; q.order()];
    for (pos, &e) in q.center_image.iter().enumerate() {
        q.center_position[e as usize] = pos as u32;
    }
    q.build_transversal();
    Ok(q)
}

impl FiniteQuotient {
    fn build_transversal(&mut self) {
        let order = self.order();
        let mut sorted: Vec<u32> = (0..order as u32).collect();
        sorted.sort_unstable_by(|&a, &b| self.elements[a as usize].cmp(&self.elements[b as usize]));
        let mut coset_of = vec![u32::MAX; order];
        let mut center_offset = vec![u32::MAX; order];
        let mut transversal = Vec::with_capacity(order / self.center_image.len().max(1));
        for &rep in &sorted {
            if coset_of[rep as usize] != u32::MAX {
                continue;
            }
            let coset = transversal.len() as u32;
            transversal.push(rep);
            for (pos, &c) in self.center_image.iter().enumerate() {
                let e = self.mul(rep, c) as usize;
                coset_of[e] = coset;
                center_offset[e] = pos as u32;
            }
        }
        self.transversal = transversal;
        self.coset_of = coset_of;
        self.center_offset = center_offset;
    }

    pub fn group(&self) -> &Arc<GroupSpec> {
        &self.group
    }

    /// Whether the whole of `G_m` was enumerated (as opposed to the image of `C` only).
    pub fn is_full(&self) -> bool {
        self.full
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> u32 {
        0
    }

    pub fn residues(&self, i: u32) -> &[u32] {
        &self.elements[i as usize]
    }

    /// Big-endian byte encoding of an element; the canonical hash key.
    pub fn encode(&self, i: u32) -> Vec<u8> {
        self.elements[i as usize].iter().flat_map(|v| v.to_be_bytes()).collect()
    }

    pub fn matrix(&self, i: u32) -> ExactMatrix {
        ExactMatrix::from_residues(self.n, self.modulus, &self.elements[i as usize])
    }

    pub fn lookup_residues(&self, r: &[u32]) -> Option<u32> {
        self.index.get(r).copied()
    }

    /// Index of the image of a group element.
    pub fn image_of(&self, g: &ExactMatrix) -> Result<u32> {
        let r = residues_of(g, self.modulus)?;
        self.lookup_residues(&r).ok_or_else(|| Error::InvalidGroup(format!("{g} does not map into the quotient mod {}", self.modulus)))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let r = mul_residues(&self.elements[a as usize], &self.elements[b as usize], self.n, self.modulus);
        self.index[&r]
    }

    pub fn inverse(&self, a: u32) -> u32 {
        let r = inverse_residues(&self.elements[a as usize], self.n, self.modulus).expect("quotient elements are invertible");
        self.index[&r]
    }

    pub fn generator_images(&self) -> &[(String, u32)] {
        &self.generator_images
    }

    pub fn center_generator_images(&self) -> &[(String, u32)] {
        &self.center_generator_images
    }

    pub fn center_image(&self) -> &[u32] {
        &self.center_image
    }

    pub fn in_center_image(&self, e: u32) -> bool {
        self.center_position[e as usize] != u32::MAX
    }

    /// Position of `e` inside [`center_image`](Self::center_image).
    pub fn center_position(&self, e: u32) -> Option<u32> {
        let p = self.center_position[e as usize];
        (p != u32::MAX).then_some(p)
    }

    pub fn transversal(&self) -> &[u32] {
        &self.transversal
    }

    /// `(coset index, position in the central image)` with
    /// `e = transversal[coset] · center_image[position]`.
    pub fn coset_decomposition(&self, e: u32) -> (u32, u32) {
        (self.coset_of[e as usize], self.center_offset[e as usize])
    }

    /// Subgroup generated by `gens`, in breadth-first order from the identity.
    pub fn subgroup_closure(&self, gens: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.order()];
        let mut out = vec![0u32];
        seen[0] = true;
        let mut head = 0;
        while head < out.len() {
            let cur = out[head];
            head += 1;
            for &g in gens {
                let next = self.mul(cur, g);
                if !seen[next as usize] {
                    seen[next as usize] = true;
                    out.push(next);
                }
            }
        }
        out
    }

    /// Order of an element.
    pub fn element_order(&self, e: u32) -> u64 {
        let mut k = 1;
        let mut cur = e;
        while cur != 0 {
            cur = self.mul(cur, e);
            k += 1;
        }
        k
    }

    /// Full multiplication table (`table[a·order + b] = a·b`) for orders up to `limit`.
    pub fn multiplication_table(&self, limit: usize) -> Option<Vec<u32>> {
        let order = self.order();
        if order > limit {
            return None;
        }
        let mut t = Vec::with_capacity(order * order);
        for a in 0..order as u32 {
            for b in 0..order as u32 {
                t.push(self.mul(a, b));
            }
        }
        Some(t)
    }

    pub fn summary(&self) -> QuotientSummary {
        QuotientSummary {
            group: self.group.name().to_string(),
            modulus: self.modulus,
            order: self.order(),
            center_image_order: self.center_image.len(),
            transversal_size: self.transversal.len(),
            generator_images: self.generator_images.iter().map(|(n, i)| (n.clone(), *i as usize)).collect(),
        }
    }
}

/// The image of `C` in `G_m`, computed as the closure of the reduced central
/// generators without enumerating the whole quotient.
pub fn center_image_residues(group: &GroupSpec, m: u64, cap: usize) -> Result<std::collections::HashSet<Residues>> {
    let n = group.dim();
    let gens: Vec<Residues> = group.center().generators.iter().map(|g| residues_of(&g.matrix, m)).collect::<Result<_>>()?;
    let id = identity_residues(n, m);
    let mut seen = std::collections::HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(cur) = queue.pop_front() {
        for g in &gens {
            let next = mul_residues(&cur, g, n, m);
            if seen.contains(&next) {
                continue;
            }
            if seen.len() >= cap {
                return Err(Error::CapExceeded { modulus: m, cap });
            }
            seen.insert(next.clone());
            queue.push_back(next);
        }
    }
    Ok(seen)
}
