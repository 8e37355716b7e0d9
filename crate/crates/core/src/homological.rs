//! Linear operators between quasi-homogeneous spaces and their coranges.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra::poly::{Monomial, Poly2};
use crate::algebra::qh::{qh_basis, QHPoly, QHType};
use crate::algebra::rat::{int, Rat};
use crate::error::{QhError, Result};
use crate::linalg::{Echelon, Matrix};
use crate::subspace::{combine, split_direct_sum, SubspaceBasis};
use crate::vectorfield::{d0_planar, Splitting, QHVF};

/// Column `j` of `matrix` holds the codomain coordinates of the image of domain element `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinMap {
    pub domain: SubspaceBasis,
    pub codomain: SubspaceBasis,
    pub matrix: Matrix,
}

impl LinMap {
    pub fn from_images(domain: SubspaceBasis, codomain: SubspaceBasis, images: &[Poly2]) -> Result<Self> {
        let mut cols = Vec::with_capacity(images.len());
        for im in images {
            let c = if im.is_zero() {
                vec![Rat::zero(); codomain.dim()]
            } else {
                codomain
                    .coords_of(im)
                    .ok_or_else(|| QhError::Internal(format!("image {im} leaves the codomain")))?
            };
            cols.push(c);
        }
        let matrix = Matrix::from_columns(&cols, codomain.dim());
        Ok(LinMap { domain, codomain, matrix })
    }

    pub fn image_of_coords(&self, c: &[Rat]) -> Poly2 {
        combine(&self.matrix.mul_vec(c), &self.codomain.elements)
    }

    pub fn apply(&self, p: &Poly2) -> Result<Poly2> {
        if p.is_zero() {
            return Ok(Poly2::zero());
        }
        let c = self
            .domain
            .coords_of(p)
            .ok_or_else(|| QhError::TypeMismatch(format!("{p} is not in the domain")))?;
        Ok(self.image_of_coords(&c))
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// Columns of the map followed by the given codomain elements.
    fn with_extra(&self, extra: &[Poly2]) -> Result<Matrix> {
        let mut cols = self.matrix.columns();
        for e in extra {
            cols.push(
                self.codomain
                    .coords_of(e)
                    .ok_or_else(|| QhError::Internal(format!("{e} is not in the codomain")))?,
            );
        }
        Ok(Matrix::from_columns(&cols, self.codomain.dim()))
    }

    /// Writes `v = L(u) + c` with `c ∈ corange`; kernel components of `u` are zero.
    pub fn split_range_corange(&self, v: &Poly2, corange: &SubspaceBasis) -> Result<(Poly2, Vec<Rat>)> {
        let m = self.with_extra(&corange.elements)?;
        let rhs = if v.is_zero() {
            vec![Rat::zero(); self.codomain.dim()]
        } else {
            self.codomain
                .coords_of(v)
                .ok_or_else(|| QhError::TypeMismatch(format!("{v} is not in the codomain")))?
        };
        let sol = m
            .solve(&rhs)
            .ok_or_else(|| QhError::InvalidComplement("range and corange do not span the codomain".into()))?;
        let (u, c) = sol.split_at(self.domain.dim());
        Ok((combine(u, &self.domain.elements), c.to_vec()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Analysis {
    pub kernel: SubspaceBasis,
    pub range: SubspaceBasis,
    pub corange: SubspaceBasis,
}

/// Kernel, range and a complement of the range inside the codomain, chosen
/// greedily from `preference` and then from the codomain basis.
pub fn subspace_analysis(l: &LinMap, preference: &[Poly2]) -> Result<Analysis> {
    let dom = &l.domain;
    let cod = &l.codomain;
    let kernel_elems: Vec<Poly2> =
        l.matrix.nullspace().iter().map(|v| combine(v, &dom.elements)).collect();
    let kernel = SubspaceBasis::new(dom.degree, dom.qtype, kernel_elems)?;
    let (_, pivots) = l.matrix.rref();
    let range_elems: Vec<Poly2> =
        pivots.iter().map(|&j| combine(&l.matrix.column(j), &cod.elements)).collect();
    let range = SubspaceBasis::new(cod.degree, cod.qtype, range_elems)?;
    let mut ech = Echelon::new(cod.dim());
    for j in &pivots {
        ech.insert(&l.matrix.column(*j));
    }
    let mut chosen = Vec::new();
    for cand in preference.iter().chain(&cod.elements) {
        if ech.rank() == cod.dim() {
            break;
        }
        let Some(c) = cod.coords_of(cand) else { continue };
        if ech.insert(&c) {
            chosen.push(cand.clone());
        }
    }
    let corange = SubspaceBasis::new(cod.degree, cod.qtype, chosen)?;
    Ok(Analysis { kernel, range, corange })
}

fn whole_sorted(degree: i64, t: QHType) -> SubspaceBasis {
    let mut monos = qh_basis(degree, t);
    monos.sort();
    SubspaceBasis { degree, qtype: t, elements: monos.into_iter().map(Poly2::monomial).collect() }
}

/// `ℓ_k : 𝒫_{k−n} → 𝒫_k`, `μ ↦ ∇μ·F_n`.
pub fn op_ell(k: i64, f_n: &QHVF) -> LinMap {
    let t = f_n.qtype;
    let fp = f_n.to_planar();
    let dom = whole_sorted(k - f_n.degree, t);
    let cod = whole_sorted(k, t);
    let images: Vec<Poly2> = dom.elements.iter().map(|m| fp.derive(m)).collect();
    LinMap::from_images(dom, cod, &images).expect("ℓ maps 𝒫_{k−n} into 𝒫_k")
}

fn h_multiples(h: &QHPoly, degree: i64) -> Vec<Poly2> {
    qh_basis(degree - h.degree, h.qtype).into_iter().map(|m| h.poly.mul_monomial(m)).collect()
}

fn check_delta(delta: &SubspaceBasis, h: &QHPoly) -> Result<()> {
    let hm = SubspaceBasis::new(delta.degree, h.qtype, h_multiples(h, delta.degree))?;
    if !delta.is_complement_of(&hm) {
        return Err(QhError::InvalidComplement(format!(
            "Δ of degree {} is not a complement of h·𝒫",
            delta.degree
        )));
    }
    Ok(())
}

/// Projection of `∇g·(F_n − ((n+|t|)/(n+k+|t|)) μ D₀)` onto Δ along `h·𝒫_k`,
/// for `g ∈ Δ_{k+|t|}`.
pub fn op_ell_c(k: i64, f_n: &QHVF, split: &Splitting, delta_dom: &SubspaceBasis, delta_cod: &SubspaceBasis) -> Result<LinMap> {
    let t = f_n.qtype;
    let n = f_n.degree;
    let top = n + k + t.abs();
    if delta_dom.degree != k + t.abs() || delta_cod.degree != top {
        return Err(QhError::InvalidComplement("Δ degrees do not match k".into()));
    }
    check_delta(delta_dom, &split.h)?;
    check_delta(delta_cod, &split.h)?;
    let ratio = Rat::new((n + t.abs()).into(), top.into());
    let field = f_n.to_planar().sub(&d0_planar(t).times(&split.mu.poly).scale(&ratio));
    let hm = h_multiples(&split.h, top);
    let mut images = Vec::new();
    for g in &delta_dom.elements {
        let img = field.derive(g);
        let (c, _) = split_direct_sum(&img, &delta_cod.elements, &hm, top, t)?;
        images.push(combine(&c, &delta_cod.elements));
    }
    LinMap::from_images(delta_dom.clone(), delta_cod.clone(), &images)
}

/// `δ : 𝒫_{k − deg f} → 𝒫_k`, `p ↦ p f`.
pub fn op_delta(k: i64, f: &QHPoly) -> LinMap {
    let t = f.qtype;
    let dom = whole_sorted(k - f.degree, t);
    let cod = whole_sorted(k, t);
    let images: Vec<Poly2> = dom.elements.iter().map(|p| p * &f.poly).collect();
    LinMap::from_images(dom, cod, &images).expect("δ maps into 𝒫_k")
}

/// `ℓ̃ : 𝒫_k → 𝒫_{n+k}`, `p ↦ ∇p·(F_n − (1/k) K_n D₀) = ∇p·F_n − K_n p`.
pub fn op_ell_tilde(k: i64, f_n: &QHVF, k_n: &QHPoly) -> LinMap {
    let t = f_n.qtype;
    let fp = f_n.to_planar();
    let dom = whole_sorted(k, t);
    let cod = whole_sorted(f_n.degree + k, t);
    let images: Vec<Poly2> = dom.elements.iter().map(|p| &fp.derive(p) - &(&k_n.poly * p)).collect();
    LinMap::from_images(dom, cod, &images).expect("ℓ̃ maps into 𝒫_{n+k}")
}

/// `Ker ℓ_k = span{I_M^l}` when `k − n = lM`, else `{0}`; checked against the
/// direct kernel.
pub fn kernel_ell_structure(k: i64, f_n: &QHVF, i_m: &QHPoly) -> Result<SubspaceBasis> {
    let n = f_n.degree;
    let m = i_m.degree;
    let dom_deg = k - n;
    let expected = if dom_deg >= 0 && dom_deg % m == 0 {
        let l = (dom_deg / m) as u32;
        SubspaceBasis::new(dom_deg, f_n.qtype, vec![i_m.poly.pow(l)])?
    } else {
        SubspaceBasis::empty(dom_deg, f_n.qtype)
    };
    let direct = subspace_analysis(&op_ell(k, f_n), &[])?.kernel;
    let same = direct.dim() == expected.dim() && expected.elements.iter().all(|e| direct.contains(e));
    if !same {
        return Err(QhError::Internal(format!("kernel of ℓ_{k} is not generated by powers of {}", i_m.poly)));
    }
    Ok(expected)
}

/// `I_M · Cor(ℓ_k)`, verified to complement `Range(ℓ_{k+M})`.
pub fn corange_cyclic(k: i64, corange_k: &SubspaceBasis, i_m: &QHPoly, f_n: &QHVF) -> Result<SubspaceBasis> {
    let target = k + i_m.degree;
    let elems: Vec<Poly2> = corange_k.elements.iter().map(|e| e * &i_m.poly).collect();
    let out = SubspaceBasis::new(target, f_n.qtype, elems)
        .map_err(|e| QhError::Internal(format!("I_M·Cor(ℓ_{k}) is degenerate: {e}")))?;
    let range = subspace_analysis(&op_ell(target, f_n), &[])?.range;
    if !out.is_complement_of(&range) {
        return Err(QhError::Internal(format!("I_M·Cor(ℓ_{k}) does not complement Range(ℓ_{target})")));
    }
    Ok(out)
}

/// Candidates `I_M^c h^b x^a` of degree `j`, ordered by `c` then `b` descending.
pub fn corange_preference(j: i64, t: QHType, h: &QHPoly, i_m: Option<&QHPoly>) -> Vec<Poly2> {
    let mut out = Vec::new();
    let m = i_m.map(|p| p.degree).unwrap_or(i64::MAX);
    let max_c = if i_m.is_some() && m > 0 && j > 0 { j / m } else { 0 };
    for c in (0..=max_c).rev() {
        let rest_c = j - c * m;
        let max_b = if h.degree > 0 { rest_c / h.degree } else { 0 };
        for b in (0..=max_b).rev() {
            let rest = rest_c - b * h.degree;
            if rest < 0 || rest % t.t1 as i64 != 0 {
                continue;
            }
            let a = (rest / t.t1 as i64) as u32;
            let mut p = Poly2::monomial(Monomial::new(a, 0));
            if b > 0 {
                p = &p * &h.poly.pow(b as u32);
            }
            if c > 0 {
                p = &p * &i_m.expect("c > 0 needs I_M").poly.pow(c as u32);
            }
            out.push(p);
        }
    }
    out
}

/// Position of a corange element in the cyclic pattern `η · I_M^i`, with `η`
/// taken from a base corange of degree in `[n, M+n−1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorangeSlot {
    pub degree: i64,
    pub cyclic_index: u32,
    pub base_degree: i64,
    pub base_index: usize,
    pub base: Poly2,
    pub element: Poly2,
}

/// Coranges `Cor(ℓ_j)` for all `j`: computed directly on one cyclic period and
/// propagated by multiplication with `I_M` above it.
#[derive(Clone, Debug)]
pub struct CorangeTable {
    pub f_n: QHVF,
    pub h: QHPoly,
    pub i_m: Option<QHPoly>,
    base: BTreeMap<i64, SubspaceBasis>,
    cache: std::cell::RefCell<BTreeMap<i64, SubspaceBasis>>,
}

impl CorangeTable {
    pub fn new(f_n: &QHVF, h: &QHPoly, i_m: Option<&QHPoly>) -> Result<Self> {
        let mut base = BTreeMap::new();
        if let Some(im) = i_m {
            let n = f_n.degree;
            for j in n..n + im.degree {
                base.insert(j, Self::direct(j, f_n, h, Some(im))?);
            }
        }
        Ok(CorangeTable {
            f_n: f_n.clone(),
            h: h.clone(),
            i_m: i_m.cloned(),
            base,
            cache: Default::default(),
        })
    }

    fn direct(j: i64, f_n: &QHVF, h: &QHPoly, i_m: Option<&QHPoly>) -> Result<SubspaceBasis> {
        let pref = corange_preference(j, f_n.qtype, h, i_m);
        Ok(subspace_analysis(&op_ell(j, f_n), &pref)?.corange)
    }

    pub fn period(&self) -> Option<i64> {
        self.i_m.as_ref().map(|p| p.degree)
    }

    pub fn get(&self, j: i64) -> Result<SubspaceBasis> {
        let n = self.f_n.degree;
        if j < n {
            return Ok(whole_sorted(j, self.f_n.qtype));
        }
        if let Some(b) = self.base.get(&j) {
            return Ok(b.clone());
        }
        if let Some(c) = self.cache.borrow().get(&j) {
            return Ok(c.clone());
        }
        let out = match &self.i_m {
            Some(im) => corange_cyclic(j - im.degree, &self.get(j - im.degree)?, im, &self.f_n)?,
            None => Self::direct(j, &self.f_n, &self.h, None)?,
        };
        self.cache.borrow_mut().insert(j, out.clone());
        Ok(out)
    }

    /// Labels of the elements of `Cor(ℓ_j)`; an element equal to `I_M^c` is
    /// reported with base `1` so that `i` counts every `I_M` factor.
    pub fn slots(&self, j: i64) -> Result<Vec<CorangeSlot>> {
        let elems = self.get(j)?.elements;
        let n = self.f_n.degree;
        let (mut i, mut bj) = (0u32, j);
        if let Some(m) = self.period() {
            while bj >= n + m {
                bj -= m;
                i += 1;
            }
        }
        let base = if bj >= n && self.i_m.is_some() { self.get(bj)?.elements } else { elems.clone() };
        Ok(elems
            .into_iter()
            .enumerate()
            .map(|(idx, e)| {
                let (mut b, mut ci, mut bd) = (base[idx].clone(), i, bj);
                if let Some(im) = &self.i_m {
                    if b == im.poly {
                        b = Poly2::one();
                        ci += 1;
                        bd -= im.degree;
                    }
                }
                CorangeSlot { degree: j, cyclic_index: ci, base_degree: bd, base_index: idx, base: b, element: e }
            })
            .collect())
    }
}

/// Matrix of `g ↦ C-part of −[F_n, X_g]` on `Δ_{k+|t|} → Δ_{n+k+|t|}`.
pub fn c_block(k: i64, f_n: &QHVF, split: &Splitting, delta_dom: &SubspaceBasis, delta_cod: &SubspaceBasis) -> Result<(LinMap, Vec<crate::vectorfield::CDFDecomposition>)> {
    use crate::vectorfield::{cdf_decompose, hamiltonian_planar, lie_bracket};
    let t = f_n.qtype;
    let fp = f_n.to_planar();
    let mut images = Vec::new();
    let mut parts = Vec::new();
    for g in &delta_dom.elements {
        let b = lie_bracket(&fp, &hamiltonian_planar(g)).neg();
        let bq = QHVF::from_planar(&b, f_n.degree + k, t)?;
        let d = cdf_decompose(&bq, f_n, split, delta_cod)?;
        images.push(d.g.poly.clone());
        parts.push(d);
    }
    Ok((LinMap::from_images(delta_dom.clone(), delta_cod.clone(), &images)?, parts))
}

/// `d` at which the C-block of generator degree `k` degenerates.
pub fn small_divisor_value(n: i64, k: i64) -> Rat {
    Rat::one() + int(2 * (n + 1)) / int(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;
    use crate::subspace::ambient_coords;
    use crate::algebra::rat::rat;
    use crate::preform::b_template;
    use crate::vectorfield::{delta_complement, split_conservative_dissipative};
    use proptest::prelude::*;

    fn t12() -> QHType {
        QHType::new(1, 2).unwrap()
    }

    fn p(s: &str) -> Poly2 {
        parse_poly(s).unwrap()
    }

    fn f1() -> QHVF {
        QHVF::new(p("y - 1/3*x^2"), p("2*x^3 - 2/3*x*y"), 1, t12()).unwrap()
    }

    fn i6() -> QHPoly {
        QHPoly::from_poly(p("(y - x^2)*(y + x^2)^2"), t12()).unwrap()
    }

    fn table() -> CorangeTable {
        let f = f1();
        let s = split_conservative_dissipative(&f);
        CorangeTable::new(&f, &s.h, Some(&i6())).unwrap()
    }

    #[test]
    fn ell_examples() {
        let f = f1();
        let l3 = op_ell(3, &f);
        let (a, b) = (rat(2, 5), rat(-7, 3));
        let mu = &p("x^2").scale(&a) + &p("y").scale(&b);
        let expect = &p("x^3").scale(&(rat(-2, 3) * (&a - int(3) * &b)))
            + &p("x*y").scale(&(rat(2, 3) * (int(3) * &a - &b)));
        assert_eq!(l3.apply(&mu).unwrap(), expect);
        assert_eq!(op_ell(2, &f).apply(&p("x")).unwrap(), p("y - 1/3*x^2"));
        assert!(op_ell(1, &f).apply(&Poly2::one()).unwrap().is_zero());
    }

    #[test]
    fn section5_coranges() {
        let tab = table();
        let h = p("-1/2*y^2 + 1/2*x^4");
        let expect: Vec<Vec<Poly2>> =
            vec![vec![p("x")], vec![p("x^2")], vec![], vec![h], vec![], vec![i6().poly]];
        for (j, e) in (1..=6).zip(expect) {
            assert_eq!(tab.get(j).unwrap().elements, e, "Cor(ℓ_{j})");
        }
        assert_eq!(tab.get(7).unwrap().elements, vec![&p("x") * &i6().poly]);
        assert!(tab.get(9).unwrap().elements.is_empty());
        assert_eq!(tab.get(12).unwrap().elements, vec![i6().poly.pow(2)]);
        let direct = subspace_analysis(&op_ell(12, &f1()), &[]).unwrap();
        assert!(tab.get(12).unwrap().is_complement_of(&direct.range));
    }

    #[test]
    fn trivial_analyses() {
        let t = t12();
        let dom = whole_sorted(2, t);
        let cod = whole_sorted(3, t);
        let z = LinMap::from_images(dom.clone(), cod.clone(), &[Poly2::zero(), Poly2::zero()]).unwrap();
        let a = subspace_analysis(&z, &[]).unwrap();
        assert_eq!(a.kernel.dim(), 2);
        assert_eq!(a.corange.dim(), cod.dim());
        let id = LinMap::from_images(dom.clone(), dom.clone(), &dom.elements).unwrap();
        let a = subspace_analysis(&id, &[]).unwrap();
        assert_eq!((a.kernel.dim(), a.corange.dim()), (0, 0));
    }

    #[test]
    fn kernels() {
        let f = f1();
        assert_eq!(kernel_ell_structure(7, &f, &i6()).unwrap().elements, vec![i6().poly]);
        assert_eq!(kernel_ell_structure(4, &f, &i6()).unwrap().dim(), 0);
        assert_eq!(kernel_ell_structure(13, &f, &i6()).unwrap().elements, vec![i6().poly.pow(2)]);
        for k in 1..=19 {
            let dim = subspace_analysis(&op_ell(k, &f), &[]).unwrap().kernel.dim();
            assert_eq!(dim, usize::from((k - 1) % 6 == 0), "k = {k}");
            kernel_ell_structure(k, &f, &i6()).unwrap();
        }
    }

    #[test]
    fn cyclicity() {
        let tab = table();
        let f = f1();
        for k in 1..=12 {
            let direct = subspace_analysis(&op_ell(k + 6, &f), &[]).unwrap();
            let shifted = tab.get(k + 6).unwrap();
            assert_eq!(shifted.dim(), tab.get(k).unwrap().dim());
            assert_eq!(direct.corange.dim(), tab.get(k).unwrap().dim());
            assert!(shifted.is_complement_of(&direct.range));
        }
    }

    #[test]
    fn slots_follow_cyclic_pattern() {
        let tab = table();
        let s = tab.slots(6).unwrap();
        assert_eq!((s[0].cyclic_index, s[0].base.clone()), (1, Poly2::one()));
        let s = tab.slots(8).unwrap();
        assert_eq!((s[0].cyclic_index, s[0].base.clone()), (1, p("x^2")));
        let s = tab.slots(12).unwrap();
        assert_eq!((s[0].cyclic_index, s[0].base.clone()), (2, Poly2::one()));
        let s = tab.slots(4).unwrap();
        assert_eq!((s[0].cyclic_index, s[0].base_degree), (0, 4));
    }

    fn b4(n: u32, d: Rat) -> (QHVF, Splitting) {
        let t = QHType::new(1, n as i64 + 1).unwrap();
        let f = QHVF::from_planar(&b_template(n, 1, &d), n as i64, t).unwrap();
        let s = split_conservative_dissipative(&f);
        (f, s)
    }

    fn ell_c(k: i64, f: &QHVF, s: &Splitting) -> LinMap {
        let t = f.qtype;
        let dd = delta_complement(k + t.abs(), &s.h, &[]).unwrap();
        let dc = delta_complement(f.degree + k + t.abs(), &s.h, &[]).unwrap();
        op_ell_c(k, f, s, &dd, &dc).unwrap()
    }

    #[test]
    fn ell_c_regular_inside_unit_interval() {
        for n in 1..=2u32 {
            for d in [rat(-1, 3), rat(1, 2), Rat::zero(), rat(-7, 8)] {
                let (f, s) = b4(n, d);
                for k in 1..=30 {
                    let l = ell_c(k, &f, &s);
                    let a = subspace_analysis(&l, &[]).unwrap();
                    assert_eq!((a.kernel.dim(), a.corange.dim()), (0, 0), "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn ell_c_singular_at_small_divisor() {
        for (n, k) in [(1i64, 4i64), (1, 2), (2, 3), (1, 8)] {
            let d = small_divisor_value(n, k);
            let (f, s) = b4(n as u32, d.clone());
            let l = ell_c(k, &f, &s);
            assert!(l.rank() < l.domain.dim(), "n={n} k={k} d={d}");
            let (f, s) = b4(n as u32, -d);
            assert!(ell_c(k, &f, &s).rank() < l.domain.dim());
        }
    }

    #[test]
    fn c_block_is_ell_c() {
        // The C-part of −[F_n, X_g] is X_{ℓ^c(g)}.
        for n in 1..=2u32 {
            for d in [rat(-1, 3), rat(5, 2)] {
                let (f, s) = b4(n, d);
                let t = f.qtype;
                for k in 1..=8 {
                    let dd = delta_complement(k + t.abs(), &s.h, &[]).unwrap();
                    let dc = delta_complement(f.degree + k + t.abs(), &s.h, &[]).unwrap();
                    let lc = op_ell_c(k, &f, &s, &dd, &dc).unwrap();
                    let (cb, _) = c_block(k, &f, &s, &dd, &dc).unwrap();
                    assert_eq!(cb.matrix, lc.matrix, "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn delta_injective_and_tilde_complement() {
        for n in 1..=2u32 {
            let (f, _) = b4(n, rat(-1, 3));
            let t = f.qtype;
            let n = n as i64;
            let fc = QHPoly::from_poly(&Poly2::y() - &Poly2::term(int(1), n as u32 + 1, 0), t).unwrap();
            let kn = QHPoly::from_poly(Poly2::term(int(n + 1) * (rat(-1, 3) - int(1)), n as u32, 0), t).unwrap();
            for k in n + 1..=20 {
                let d = op_delta(k, &fc);
                assert_eq!(subspace_analysis(&d, &[]).unwrap().kernel.dim(), 0);
                let xk = Poly2::term(int(1), k as u32, 0);
                let cor = subspace_analysis(&d, &[xk.clone()]).unwrap().corange;
                assert_eq!(cor.elements, vec![xk.clone()]);
                let lt = op_ell_tilde(k, &f, &kn);
                let img = SubspaceBasis::new(n + k, t, vec![lt.apply(&xk).unwrap()]).unwrap();
                let rng = subspace_analysis(&op_delta(n + k, &fc), &[]).unwrap().range;
                assert!(img.is_complement_of(&rng), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn tilde_on_power_of_x() {
        // ℓ̃(x^k) = k x^{k−1}(y + ((k−n−1)d + n + 1)/k · x^{n+1}) for the cofactor of y − x^{n+1}.
        for n in 1..=3u32 {
            let d = rat(2, 7);
            let (f, _) = b4(n, d.clone());
            let t = f.qtype;
            let kn = QHPoly::from_poly(Poly2::term(int(n as i64 + 1) * (&d - int(1)), n, 0), t).unwrap();
            for k in 1..=10i64 {
                let got = op_ell_tilde(k, &f, &kn).apply(&Poly2::term(int(1), k as u32, 0)).unwrap();
                let c = (int(k - n as i64 - 1) * &d + int(n as i64 + 1)) / int(k);
                let expect = (&Poly2::y() + &Poly2::term(c, n + 1, 0)).mul_monomial(Monomial::new(k as u32 - 1, 0)).scale(&int(k));
                assert_eq!(got, expect);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn unique_decomposition(k in 3i64..14, coeffs in proptest::collection::vec(-20i64..20, 16)) {
            let f = f1();
            let t = f.qtype;
            let fc = QHPoly::from_poly(p("y - x^2"), t).unwrap();
            let kn = QHPoly::from_poly(p("-8/3*x"), t).unwrap();
            let q = Poly2::from_terms(qh_basis(1 + k, t).into_iter().zip(coeffs.iter().map(|c| int(*c))));
            let xk = Poly2::term(int(1), k as u32, 0);
            let lt = op_ell_tilde(k, &f, &kn);
            let first = vec![lt.apply(&xk).unwrap()];
            let second: Vec<Poly2> = qh_basis(k - 1, t).into_iter().map(|m| &fc.poly * &Poly2::monomial(m)).collect();
            let (a, b) = split_direct_sum(&q, &first, &second, 1 + k, t).unwrap();
            let rebuilt = &combine(&a, &first) + &combine(&b, &second);
            prop_assert_eq!(rebuilt, q);
            let cols: Vec<Vec<Rat>> = first.iter().chain(&second).map(|e| ambient_coords(e, 1 + k, t)).collect();
            prop_assert_eq!(Matrix::from_columns(&cols, qh_basis(1 + k, t).len()).rank(), cols.len());
        }
    }
}
