use proptest::prelude::*;
use tactile_core::{difference_image, io, Distortion, GridSpec, ShearField, TactileFrame};

fn arb_frame(ts: f64) -> impl Strategy<Value = TactileFrame> {
    (32u32..48, 32u32..48)
        .prop_flat_map(move |(w, h)| {
            let len = (w * h * 3) as usize;
            (
                Just(w),
                Just(h),
                proptest::collection::vec(any::<u8>(), len..=len),
            )
        })
        .prop_map(move |(w, h, px)| {
            TactileFrame::new(w, h, px, ts, Distortion::Rectified).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn diff_of_frame_with_itself_is_zero(f in arb_frame(0.0)) {
        let d = difference_image(&f, &f).unwrap();
        prop_assert!(d.is_zero());
    }

    #[test]
    fn diff_is_antisymmetric((w, h) in (32u32..40, 32u32..40),
                             seed in any::<u64>()) {
        let len = (w * h * 3) as usize;
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 33) as u8
        };
        let a: Vec<u8> = (0..len).map(|_| next()).collect();
        let b: Vec<u8> = (0..len).map(|_| next()).collect();
        let fa = TactileFrame::new(w, h, a, 0.0, Distortion::Rectified).unwrap();
        let fb = TactileFrame::new(w, h, b, 1.0, Distortion::Rectified).unwrap();
        let ab = difference_image(&fa, &fb).unwrap();
        let ba = difference_image(&fb, &fa).unwrap();
        for (x, y) in ab.values().iter().zip(ba.values()) {
            prop_assert_eq!(*x, -*y);
        }
    }

    #[test]
    fn shear_field_serialization_round_trips_bit_exactly(
        gh in 2u32..8, gw in 2u32..8, seed in any::<u64>()
    ) {
        let grid = GridSpec::new(gh, gw).unwrap();
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 40) as f32 / 1024.0) - 8.0
        };
        let field = ShearField::from_fn(grid, 64, 64, |_, _| (next(), next()));
        let bytes = io::encode_shear_field(&field);
        let back = io::decode_shear_field(&bytes, "<prop>").unwrap();
        prop_assert_eq!(&field, &back);
        prop_assert_eq!(bytes, io::encode_shear_field(&back));
    }
}
