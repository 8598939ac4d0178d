//! Congruence quotients, coset data, filtration search and separability probes.

mod core;
mod filtration;
mod finite;
mod probe;

pub use self::core::normal_core;
pub use filtration::{
    central_images_compatible, filtration_witness, filtration_witness_pair, verify_filtration, FiltrationWitness, RejectedModulus,
};
pub use finite::{
    center_image_residues, enumerate_center_quotient, enumerate_quotient, FiniteQuotient, QuotientSummary, Residues, DEFAULT_CAP,
};
pub use probe::{profinite_probe, ProbeReport, ProbeTimings, ProbeVerdict, Verdict, ONE_SIDED_CAVEAT};

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::exact::Ring;
    use crate::groups::{abels, abels_x0, heisenberg};

    fn heis() -> Arc<crate::groups::GroupSpec> {
        Arc::new(heisenberg())
    }

    #[test]
    fn heisenberg_orders_are_cubes() {
        let g = heis();
        for m in 1..=6u64 {
            let q = enumerate_quotient(&g, m, DEFAULT_CAP).unwrap();
            assert_eq!(q.order() as u64, m.pow(3));
            assert_eq!(q.center_image().len() as u64, m);
            assert_eq!(q.transversal().len() * q.center_image().len(), q.order());
        }
    }

    #[test]
    fn heisenberg_mod_three() {
        let q = enumerate_quotient(&heis(), 3, DEFAULT_CAP).unwrap();
        assert_eq!(q.order(), 27);
        assert_eq!(q.center_image().len(), 3);
        assert_eq!(q.transversal().len(), 9);
    }

    #[test]
    fn trivial_modulus() {
        let q = enumerate_quotient(&Arc::new(abels(3).unwrap()), 1, 10).unwrap();
        assert_eq!(q.order(), 1);
        assert_eq!(q.transversal(), &[0]);
    }

    #[test]
    fn cap_and_prime_errors() {
        assert_eq!(enumerate_quotient(&heis(), 5, 100).unwrap_err(), crate::Error::CapExceeded { modulus: 5, cap: 100 });
        let a = Arc::new(abels(2).unwrap());
        assert_eq!(enumerate_quotient(&a, 4, 100).unwrap_err(), crate::Error::NonInvertiblePrime { p: 2, modulus: 4 });
    }

    #[test]
    fn transversal_is_canonical() {
        let q = enumerate_quotient(&heis(), 4, DEFAULT_CAP).unwrap();
        for (coset, &rep) in q.transversal().iter().enumerate() {
            for &c in q.center_image() {
                let e = q.mul(rep, c);
                assert!(q.encode(rep) <= q.encode(e));
                assert_eq!(q.coset_decomposition(e).0 as usize, coset);
            }
        }
        let reps: Vec<Vec<u8>> = q.transversal().iter().map(|&t| q.encode(t)).collect();
        assert!(reps.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn coset_decomposition_reassembles() {
        let q = enumerate_quotient(&heis(), 5, DEFAULT_CAP).unwrap();
        for e in 0..q.order() as u32 {
            let (coset, pos) = q.coset_decomposition(e);
            assert_eq!(q.mul(q.transversal()[coset as usize], q.center_image()[pos as usize]), e);
        }
    }

    #[test]
    fn inverses_in_quotient() {
        let q = enumerate_quotient(&Arc::new(abels(2).unwrap()), 3, DEFAULT_CAP).unwrap();
        for e in (0..q.order() as u32).step_by(7) {
            assert_eq!(q.mul(e, q.inverse(e)), q.identity());
        }
    }

    #[test]
    fn filtration_examples() {
        let g = heis();
        let x = g.generator("x").unwrap().clone();
        let z = g.generator("z").unwrap().clone();
        let e = g.identity();
        let w = filtration_witness(&g, std::slice::from_ref(&x), &[(z.clone(), e.clone())], 1..=10, DEFAULT_CAP).unwrap();
        assert_eq!(w.modulus, 2);
        let xz = x.mul(&z).unwrap();
        let z2 = z.pow(2).unwrap();
        let w = filtration_witness(&g, std::slice::from_ref(&xz), &[(z2.clone(), e.clone())], 1..=10, DEFAULT_CAP).unwrap();
        assert_eq!(w.modulus, 3);
        assert!(verify_filtration(&w.quotient, &[xz], &[(z2, e)]).unwrap());
        assert_eq!(w.rejected.iter().map(|r| r.modulus).collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(filtration_witness(&g, &[], &[], 1..=10, DEFAULT_CAP).unwrap().modulus, 1);
    }

    #[test]
    fn filtration_rejects_bad_inputs_and_exhaustion() {
        let g = heis();
        let z = g.generator("z").unwrap().clone();
        assert!(matches!(
            filtration_witness(&g, std::slice::from_ref(&z), &[], 1..=3, DEFAULT_CAP),
            Err(crate::Error::PreconditionFailed(_))
        ));
        let z6 = z.pow(6).unwrap();
        assert_eq!(
            filtration_witness(&g, &[], &[(z6, g.identity())], 1..=3, DEFAULT_CAP).unwrap_err(),
            crate::Error::SearchExhausted { lo: 1, hi: 3 }
        );
    }

    #[test]
    fn pair_witness_same_group() {
        let g = heis();
        let x = g.generator("x").unwrap().clone();
        let z = g.generator("z").unwrap().clone();
        let pairs = [(z.pow(2).unwrap(), g.identity())];
        let (wa, wb) =
            filtration_witness_pair(&g, &g, std::slice::from_ref(&x), std::slice::from_ref(&x), &pairs, &pairs, 1..=8, DEFAULT_CAP)
                .unwrap();
        assert_eq!(wa.modulus, 3);
        assert_eq!(wb.modulus, 3);
        assert!(central_images_compatible(&wa.quotient, &wb.quotient));
    }

    #[test]
    fn probe_examples() {
        let a = abels(2).unwrap();
        let report = profinite_probe(&a, &abels_x0(2), &[3, 5, 7], DEFAULT_CAP).unwrap();
        assert_eq!(report.inside, 3);
        let h = heisenberg();
        let report = profinite_probe(&h, h.generator("x").unwrap(), &[2, 3], DEFAULT_CAP).unwrap();
        assert_eq!(report.outside, 2);
        let z5 = h.generator_power("z", 5).unwrap();
        assert!(profinite_probe(&h, &z5, &[2], DEFAULT_CAP).is_err());
        let with_error = profinite_probe(&a, &abels_x0(2), &[3, 4], DEFAULT_CAP).unwrap();
        assert_eq!((with_error.inside, with_error.errors), (1, 1));
        assert_eq!(with_error.verdicts[1].modulus, 4);
    }

    #[test]
    fn normal_core_examples() {
        let g = heis();
        let q = enumerate_quotient(&g, 2, DEFAULT_CAP).unwrap();
        let all: Vec<u32> = (0..q.order() as u32).collect();
        assert_eq!(normal_core(&q, &all).unwrap(), all);
        let mut center = q.center_image().to_vec();
        center.sort_unstable();
        assert_eq!(normal_core(&q, &center).unwrap(), center);

        // <x> mod 2 = {e, x}; brute force: keep s iff every conjugate of s lies in <x>
        let x = q.generator_images()[0].1;
        let sub = q.subgroup_closure(&[x]);
        let brute: Vec<u32> = {
            let mut v: Vec<u32> = sub
                .iter()
                .copied()
                .filter(|&s| {
                    (0..q.order() as u32).all(|g| {
                        let c = q.matrix(g).mul(&q.matrix(s)).unwrap().mul(&q.matrix(g).inverse().unwrap()).unwrap();
                        sub.iter().any(|&t| q.matrix(t) == c)
                    })
                })
                .collect();
            v.sort_unstable();
            v
        };
        assert_eq!(normal_core(&q, &sub).unwrap(), brute);
        assert_eq!(brute, vec![0]);
        assert!(normal_core(&q, &[x]).is_err());
    }

    #[test]
    fn divisibility_gives_homomorphic_images() {
        let g = heis();
        for (m, big) in [(2u64, 4u64), (3, 9), (2, 6)] {
            let small_q = enumerate_quotient(&g, m, DEFAULT_CAP).unwrap();
            let big_q = enumerate_quotient(&g, big, DEFAULT_CAP).unwrap();
            let project = |e: u32| -> u32 {
                let r = big_q.matrix(e).reduce_mod(m).unwrap();
                small_q.lookup_residues(&r.residues().unwrap()).unwrap()
            };
            for ((_, a), (_, b)) in small_q.generator_images().iter().zip(big_q.generator_images()) {
                assert_eq!(project(*b), *a);
            }
            for (&a, &b) in big_q.generator_images().iter().map(|(_, i)| i).zip(big_q.generator_images().iter().map(|(_, i)| i).rev()) {
                assert_eq!(project(big_q.mul(a, b)), small_q.mul(project(a), project(b)));
            }
        }
    }

    #[test]
    fn matrices_round_trip() {
        let q = enumerate_quotient(&heis(), 3, DEFAULT_CAP).unwrap();
        for e in 0..q.order() as u32 {
            assert_eq!(q.image_of(&q.matrix(e)).unwrap(), e);
            assert_eq!(q.matrix(e).ring(), Ring::Mod(3));
        }
    }
}
