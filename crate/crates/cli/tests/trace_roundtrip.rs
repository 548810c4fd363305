use std::path::Path;

use proptest::prelude::*;
use superatom::fitting::{TraceData, TraceKind};
use superatom::PulseSpec;
use superatom_cli::io::{parse_trace, write_trace};

fn trace() -> impl Strategy<Value = TraceData> {
    (1usize..40, any::<bool>(), 0.1f64..30.0, -5.0f64..5.0).prop_flat_map(|(n, photon, rate, t0)| {
        (
            proptest::collection::vec(1e-6f64..2.0, n),
            proptest::collection::vec(-1e3f64..1e3, n),
            proptest::collection::vec(1e-9f64..10.0, n),
        )
            .prop_map(move |(steps, values, sem)| {
                let mut t = t0;
                let times = steps
                    .iter()
                    .map(|s| {
                        t += s;
                        t
                    })
                    .collect();
                TraceData {
                    times,
                    values,
                    sem,
                    kind: if photon { TraceKind::PhotonRate } else { TraceKind::RydbergPopulation },
                    pulse: PulseSpec::tukey(0.8, 5.0, rate).starting_at(t0.abs()),
                }
            })
    })
}

proptest! {
    #[test]
    fn write_read_write_is_byte_identical(t in trace(), manifest in any::<bool>()) {
        let m = manifest.then_some("manifest.json");
        let first = write_trace(&t, m);
        let parsed = parse_trace(Path::new("mem.csv"), std::str::from_utf8(&first).unwrap()).unwrap();
        prop_assert_eq!(&parsed.trace, &t);
        prop_assert_eq!(parsed.manifest.as_deref(), m);
        prop_assert_eq!(write_trace(&parsed.trace, parsed.manifest.as_deref()), first);
    }
}
