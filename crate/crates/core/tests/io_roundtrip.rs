use gaze_pie::io::{read_samples, read_trials, write_samples, write_trials};
use gaze_pie::layout::Technique;
use gaze_pie::experiment::TrialRecord;
use gaze_pie::GazeSample;
use proptest::prelude::*;

fn label() -> impl Strategy<Value = String> {
    "[A-Z]"
}

fn record() -> impl Strategy<Value = TrialRecord> {
    (
        "[a-z][a-z0-9_]{0,7}",
        prop::bool::ANY,
        1u32..5,
        1usize..60,
        label(),
        0u32..200_000,
        prop::option::of((label(), 0u32..10_000, prop::option::of(0u32..3000))),
        prop::bool::ANY,
    )
        .prop_map(|(user, crossing, block, trial, prescription, shown, act, warmup)| {
            let shown_ms = f64::from(shown);
            let (activated, activated_ms, activation_time_ms, return_time_ms, error) = match act {
                Some((l, dt, back)) => {
                    let error = l != prescription;
                    (Some(l), Some(shown_ms + f64::from(dt)), Some(f64::from(dt)), back.map(f64::from), error)
                }
                None => (None, None, None, None, true),
            };
            TrialRecord {
                user,
                technique: if crossing { Technique::Crossing } else { Technique::Dwell },
                block,
                trial,
                prescription,
                shown_ms,
                activated,
                activated_ms,
                activation_time_ms,
                return_time_ms,
                error,
                warmup,
            }
        })
}

proptest! {
    #[test]
    fn trial_records_roundtrip(records in prop::collection::vec(record(), 0..40)) {
        let mut buf = Vec::new();
        write_trials(&mut buf, &records).unwrap();
        prop_assert_eq!(read_trials(buf.as_slice()).unwrap(), records);
    }

    #[test]
    fn samples_roundtrip_bit_for_bit(
        raw in prop::collection::vec((any::<f64>(), any::<f64>(), any::<f64>(), any::<bool>()), 0..100),
    ) {
        let samples: Vec<GazeSample> = raw
            .into_iter()
            .filter(|(t, x, y, _)| t.is_finite() && x.is_finite() && y.is_finite())
            .map(|(t_ms, x_cm, y_cm, valid)| GazeSample { t_ms, x_cm, y_cm, valid })
            .collect();
        let mut buf = Vec::new();
        write_samples(&mut buf, &samples).unwrap();
        let back = read_samples(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), samples.len());
        for (a, b) in back.iter().zip(&samples) {
            prop_assert_eq!(a.t_ms.to_bits(), b.t_ms.to_bits());
            prop_assert_eq!(a.x_cm.to_bits(), b.x_cm.to_bits());
            prop_assert_eq!(a.y_cm.to_bits(), b.y_cm.to_bits());
            prop_assert_eq!(a.valid, b.valid);
        }
    }
}
