use proptest::prelude::*;
use qppsearch_core::codec::{rsc_encode, turbo_encode};
use qppsearch_core::qpp::{group_by_spectrum_equivalence, Permutation, Qpp};
use qppsearch_core::sim::{noiseless_llrs, TurboDecoder};
use qppsearch_core::spectrum::{
    brute_force_spectrum, exact_spectrum, spectrum_of, Budget, Control, DistanceSpectrum, SpectrumOutcome,
    SpectrumTerm,
};
use qppsearch_core::tub::{optimistic_updates, tub_fer, tub_fer_terms};

/// All `(q0, q1, q2)` with `q2 != 0` that give a permutation of length `l`.
fn valid_triples(l: usize, with_shift: bool) -> Vec<Qpp> {
    let shifts = if with_shift { l } else { 1 };
    let mut out = Vec::new();
    for q1 in 0..l {
        for q2 in 1..l {
            if Qpp::new(l, q1, q2).is_permutation() {
                out.extend((0..shifts).map(|q0| Qpp::with_shift(l, q0, q1, q2)));
            }
        }
    }
    out
}

fn valid_qpp(lengths: &'static [usize], with_shift: bool) -> impl Strategy<Value = Qpp> {
    prop::sample::select(lengths).prop_flat_map(move |l| {
        let all = valid_triples(l, with_shift);
        prop::sample::select(all)
    })
}

fn bits(l: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, l)
}

fn spectrum_strategy(m: usize) -> impl Strategy<Value = DistanceSpectrum> {
    (
        2u32..30,
        prop::collection::vec((1u32..4, 1u64..50), m),
    )
        .prop_map(move |(d1, steps)| {
            let mut d = d1;
            let terms = steps
                .into_iter()
                .map(|(gap, n)| {
                    let t = SpectrumTerm::new(d, n, n);
                    d += gap;
                    t
                })
                .collect();
            DistanceSpectrum::from_terms(m, terms, true).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bijective_iff_table_has_no_duplicates(l in 2usize..80, q1 in 0usize..80, q2 in 0usize..80) {
        let q = Qpp::new(l, q1 % l, q2 % l);
        let mut table: Vec<usize> = (0..l).map(|x| q.evaluate(x).unwrap()).collect();
        table.sort_unstable();
        table.dedup();
        prop_assert_eq!(q.is_permutation(), table.len() == l);
        prop_assert_eq!(q.permutation().is_ok(), table.len() == l);
    }

    #[test]
    fn spread_is_symmetric_under_inversion(q in valid_qpp(&[16, 24, 40, 48, 56, 64, 72, 120], false)) {
        let p = q.permutation().unwrap();
        prop_assert_eq!(p.spread(), p.inverse().spread());
    }

    #[test]
    fn spread_ignores_the_shift(q in valid_qpp(&[16, 40, 48, 56], false), q0 in 0usize..1000) {
        let shifted = Qpp::with_shift(q.length, q0 % q.length, q.q1, q.q2);
        prop_assert_eq!(q.permutation().unwrap().spread(), shifted.permutation().unwrap().spread());
    }

    #[test]
    fn spread_bounds(q in valid_qpp(&[8, 16, 40, 48, 104], false)) {
        let d = q.permutation().unwrap().spread();
        prop_assert!(d >= 2 && d <= q.length);
    }

    #[test]
    fn nonlinearity_bounds(q in valid_qpp(&[8, 16, 40, 48, 56, 64, 120, 864], false)) {
        let n = q.nonlinearity();
        prop_assert!(1 <= n.zeta_refined && n.zeta_refined <= n.zeta && n.zeta <= q.length);
        prop_assert_eq!(q.length % n.zeta, 0);
    }

    #[test]
    fn inverse_is_an_involution(q in valid_qpp(&[8, 16, 40, 48], true)) {
        let p = q.permutation().unwrap();
        let inv = p.inverse();
        prop_assert_eq!(inv.inverse(), p.clone());
        for x in 0..p.len() {
            prop_assert_eq!(inv.get(p.get(x)), x);
            prop_assert_eq!(p.get(inv.get(x)), x);
        }
    }

    #[test]
    fn grouping_partitions_the_input(l in prop::sample::select(vec![8usize, 16, 24, 40])) {
        let candidates = valid_triples(l, false);
        let groups = group_by_spectrum_equivalence(&candidates).unwrap();
        prop_assert!(groups.len() <= candidates.len());
        let mut seen: Vec<Qpp> = groups.iter().flat_map(|g| g.members.clone()).collect();
        seen.sort_by_key(|q| q.sort_key());
        let mut expected = candidates.clone();
        expected.sort_by_key(|q| q.sort_key());
        prop_assert_eq!(seen, expected);
        for g in &groups {
            let min = g.members.iter().map(|q| (q.q1, q.q2)).min().unwrap();
            prop_assert_eq!((g.representative.q1, g.representative.q2), min);
            let inv = g.permutation.inverse();
            for m in &g.members {
                let p = m.permutation().unwrap();
                prop_assert!(p == g.permutation || p == inv);
            }
        }
    }

    #[test]
    fn encoder_is_linear(q in valid_qpp(&[16], true), u in bits(16), v in bits(16)) {
        let p = q.permutation().unwrap();
        let w: Vec<u8> = u.iter().zip(&v).map(|(a, b)| a ^ b).collect();
        let cu = turbo_encode(&u, &p).unwrap().to_bits();
        let cv = turbo_encode(&v, &p).unwrap().to_bits();
        let cw = turbo_encode(&w, &p).unwrap();
        let xor: Vec<u8> = cu.iter().zip(&cv).map(|(a, b)| a ^ b).collect();
        prop_assert_eq!(cw.to_bits(), xor);
        prop_assert_eq!(cw.len(), 3 * 16 + 12);
        prop_assert!(cw.total_weight >= cw.info_weight);
    }

    #[test]
    fn both_encoders_end_in_zero(u in prop::collection::vec(0u8..2, 1..200)) {
        prop_assert_eq!(rsc_encode(&u, true).final_state, 0);
    }

    #[test]
    fn second_encoder_reads_through_the_interleaver(q in valid_qpp(&[40, 48], false), u in bits(48)) {
        let l = q.length;
        let u = &u[..l];
        let p = q.permutation().unwrap();
        let permuted: Vec<u8> = (0..l).map(|x| u[p.get(x)]).collect();
        prop_assert_eq!(turbo_encode(u, &p).unwrap().parity2, rsc_encode(&permuted, true).parity);
    }

    #[test]
    fn tub_is_monotone(s in spectrum_strategy(4), k in 0usize..4, snr in 0.0f64..8.0) {
        let base = tub_fer(&s, 40, snr);
        let mut terms = s.terms().to_vec();
        terms[k].multiplicity += 1;
        terms[k].info_weight += 1;
        let more = DistanceSpectrum::from_terms(4, terms, true).unwrap();
        prop_assert!(tub_fer(&more, 40, snr) > base);

        let lowered: Vec<SpectrumTerm> = s.terms().iter().map(|t| SpectrumTerm::new(t.distance - 1, t.multiplicity, t.info_weight)).collect();
        prop_assert!(tub_fer_terms(&lowered, 40, snr) > base);

        prop_assert!(tub_fer(&s, 40, snr + 0.5) < base);
    }

    #[test]
    fn hypotheticals_dominate_realizable_updates(
        s in spectrum_strategy(5),
        j in 1usize..=5,
        gaps in prop::collection::vec(1u32..4, 5),
        mults in prop::collection::vec(1u64..20, 5),
    ) {
        // j new distances strictly below d1, with arbitrary multiplicities.
        let d1 = s.terms()[0].distance;
        let mut new_terms = Vec::new();
        let mut d = d1;
        for k in 0..j {
            if d <= gaps[k] {
                break;
            }
            d -= gaps[k];
            new_terms.push(SpectrumTerm::new(d, mults[k], mults[k]));
        }
        let j = new_terms.len();
        prop_assume!(j >= 1);
        new_terms.reverse();
        new_terms.extend(s.terms().iter().take(5 - j).copied());
        let hyp = &optimistic_updates(&s)[j - 1];
        prop_assert!(tub_fer_terms(&new_terms, 40, 7.5) >= tub_fer_terms(hyp, 40, 7.5));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn engine_matches_brute_force(q in valid_qpp(&[8, 12, 16], true), m in prop::sample::select(vec![1usize, 3, 5])) {
        let p = q.permutation().unwrap();
        prop_assert_eq!(
            spectrum_of(&p, m, &Budget::default()).unwrap(),
            brute_force_spectrum(&p, m).unwrap()
        );
    }

    #[test]
    fn inverse_interleaver_has_the_same_spectrum(q in valid_qpp(&[8, 12, 16], true)) {
        let p = q.permutation().unwrap();
        prop_assert_eq!(brute_force_spectrum(&p, 4).unwrap(), brute_force_spectrum(&p.inverse(), 4).unwrap());
    }

    #[test]
    fn reducible_qpps_share_the_lpp_spectrum(q in valid_qpp(&[8, 12, 16], false)) {
        prop_assume!(q.is_lpp_reducible());
        let p = q.permutation().unwrap();
        let (a, b) = (p.get(0), p.get(1));
        let l = q.length;
        let lpp: Vec<usize> = (0..l).map(|x| (a + (b + l - a) * x) % l).collect();
        let lpp = Permutation::from_table(lpp).unwrap();
        prop_assert_eq!(brute_force_spectrum(&p, 3).unwrap(), brute_force_spectrum(&lpp, 3).unwrap());
    }

    #[test]
    fn events_are_monotone(q in valid_qpp(&[16, 24, 40], false), m in 1usize..5) {
        let p = q.permutation().unwrap();
        let mut snapshots: Vec<DistanceSpectrum> = Vec::new();
        let (outcome, stats) = exact_spectrum(&p, m, &Budget::default(), |e| {
            snapshots.push(e.snapshot.clone());
            Control::Continue
        }).unwrap();
        prop_assert_eq!(stats.events as usize, snapshots.len());
        for w in snapshots.windows(2) {
            prop_assert!(w[1].terms()[0].distance <= w[0].terms()[0].distance);
            // Every earlier term is still counted at least as often, or has
            // been pushed out by lighter words.
            for t in w[0].terms() {
                match w[1].terms().iter().find(|u| u.distance == t.distance) {
                    Some(u) => prop_assert!(u.multiplicity >= t.multiplicity),
                    None => prop_assert!(w[1].is_full() && w[1].threshold().unwrap() < t.distance),
                }
            }
        }
        let SpectrumOutcome::Complete(last) = outcome else { panic!("not complete") };
        prop_assert!(last.is_complete());
        prop_assert_eq!(snapshots.last().unwrap().terms(), last.terms());
    }

    #[test]
    fn abort_stops_the_event_stream(q in valid_qpp(&[16, 40], false), after in 1usize..6) {
        let p = q.permutation().unwrap();
        let mut seen = 0usize;
        let (outcome, stats) = exact_spectrum(&p, 5, &Budget::default(), |_| {
            seen += 1;
            if seen == after { Control::Abort } else { Control::Continue }
        }).unwrap();
        prop_assert_eq!(stats.events as usize, seen);
        if outcome.is_aborted() {
            prop_assert_eq!(seen, after);
        } else {
            prop_assert!(seen < after);
        }
    }

    #[test]
    fn deterministic_spectra(q in valid_qpp(&[40, 48], false)) {
        let p = q.permutation().unwrap();
        let run = || {
            let mut events = Vec::new();
            let out = exact_spectrum(&p, 3, &Budget::default(), |e| {
                events.push(e.snapshot.clone());
                Control::Continue
            }).unwrap().0;
            (out, events)
        };
        prop_assert_eq!(run(), run());
    }

    #[test]
    fn noiseless_words_decode_exactly(q in valid_qpp(&[40, 48], false), u in bits(48)) {
        let l = q.length;
        let p = q.permutation().unwrap();
        let cw = turbo_encode(&u[..l], &p).unwrap();
        let mut dec = TurboDecoder::new(&p, 8, 10.0);
        let out = dec.decode(&noiseless_llrs(&cw.to_bits(), 20.0)).unwrap();
        prop_assert_eq!(&out.bits[..], &u[..l]);
        prop_assert!(out.iterations < 8);
        prop_assert!(out.llrs.iter().all(|v| v.abs() > 10.0));
    }
}
