//! Property-based checks of the invariants that hold for every input.

use proptest::prelude::*;

use speckle_core::benchmark::{bd_cdf, bd_quantile};
use speckle_core::distances::{d_cr, d_ks, distance_report, ks_statistic, DistanceSettings};
use speckle_core::estimators::{ecdf_eval, ecf_eval, EvalGrid, Kde, KdeSettings};
use speckle_core::ingest::{
    decode_csv_matrix, decode_pgm, decode_png, encode_png_gray, extract_roi, normalize_rms, parse_amplitude_csv,
    write_amplitude_csv, PixelMatrix, RoiSpec,
};
use speckle_core::stats::{linear_regression, pearson_r, spearman_rho, PairedSeries};
use speckle_core::AmplitudeSample;

fn amplitudes(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..50.0, 2..max_len).prop_filter("needs spread", |v| {
        v.iter().any(|&x| x > 0.0) && v.iter().any(|&x| (x - v[0]).abs() > 1e-6)
    })
}

/// KS statistic from a quadratic count of ECDF values at each data point.
fn ks_quadratic(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    values
        .iter()
        .map(|&x| {
            let at = values.iter().filter(|&&v| v <= x).count() as f64 / n;
            let below = values.iter().filter(|&&v| v < x).count() as f64 / n;
            let f = bd_cdf(x).unwrap();
            (at - f).abs().max((below - f).abs())
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalization_gives_unit_mean_square(v in amplitudes(300)) {
        let s = normalize_rms(&AmplitudeSample::new(v).unwrap()).unwrap();
        let ms = s.values().iter().map(|x| x * x).sum::<f64>() / s.len() as f64;
        prop_assert!((ms - 1.0).abs() < 1e-12);
        prop_assert!(s.is_normalized());
    }

    #[test]
    fn ks_matches_quadratic_oracle(v in amplitudes(200)) {
        let s = normalize_rms(&AmplitudeSample::new(v).unwrap()).unwrap();
        let d = d_ks(&s).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!((d - ks_quadratic(s.values())).abs() < 1e-12);
    }

    #[test]
    fn ks_statistic_is_zero_one_bounded_for_any_cdf(v in amplitudes(100), rate in 0.1f64..5.0) {
        let d = ks_statistic(&v, |x| 1.0 - (-rate * x).exp());
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!(d >= 0.5 / v.len() as f64 - 1e-15);
    }

    #[test]
    fn report_is_permutation_and_power_of_two_invariant(v in amplitudes(150), shift in 0usize..150, exp in -8i32..8) {
        let raw = AmplitudeSample::new(v.clone()).unwrap();
        let base = distance_report(&normalize_rms(&raw).unwrap(), &DistanceSettings::default()).unwrap();
        let mut rotated = v.clone();
        let k = shift % rotated.len();
        rotated.rotate_left(k);
        rotated.reverse();
        let r = distance_report(&normalize_rms(&AmplitudeSample::new(rotated).unwrap()).unwrap(), &DistanceSettings::default()).unwrap();
        prop_assert_eq!(r, base);
        let factor = 2f64.powi(exp);
        let scaled = AmplitudeSample::new(v.iter().map(|x| x * factor).collect()).unwrap();
        let s = distance_report(&normalize_rms(&scaled).unwrap(), &DistanceSettings::default()).unwrap();
        prop_assert_eq!(s.values(), base.values());
    }

    #[test]
    fn d_cr_is_scale_free(v in amplitudes(200), k in 0.001f64..1000.0) {
        let a = d_cr(&AmplitudeSample::new(v.clone()).unwrap()).unwrap();
        let b = d_cr(&AmplitudeSample::new(v.iter().map(|x| x * k).collect()).unwrap()).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn kde_is_a_density(v in prop::collection::vec(0.05f64..4.0, 5..80)) {
        let s = AmplitudeSample::new(v).unwrap();
        let kde = Kde::fit(&s, &KdeSettings::default()).unwrap();
        let h = kde.bandwidth();
        let lo = s.values().iter().copied().fold(f64::INFINITY, f64::min) - 12.0 * h;
        let hi = s.values().iter().copied().fold(0.0, f64::max) + 12.0 * h;
        let m = 20_000;
        let step = (hi - lo) / m as f64;
        let mass: f64 = (0..=m).map(|i| kde.density(lo + i as f64 * step)).sum::<f64>() * step;
        prop_assert!((mass - 1.0).abs() < 1e-3, "mass {}", mass);
        prop_assert!(kde.density(lo + 0.3 * (hi - lo)) >= 0.0);
    }

    #[test]
    fn ecdf_is_monotone_and_ecf_bounded(v in amplitudes(100), a in 0.0f64..60.0, b in 0.0f64..60.0) {
        let s = AmplitudeSample::new(v).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(ecdf_eval(&s, lo).unwrap() <= ecdf_eval(&s, hi).unwrap());
        prop_assert_eq!(ecdf_eval(&s, 60.0).unwrap(), 1.0);
        let grid = EvalGrid::default_frequency();
        let cf = ecf_eval(&s, &grid).unwrap();
        prop_assert!((cf[0].1.re - 1.0).abs() < 1e-12 && cf[0].1.im.abs() < 1e-12);
        prop_assert!(cf.iter().all(|(_, c)| c.norm() <= 1.0 + 1e-12));
    }

    #[test]
    fn quantile_inverts_cdf(p in 1e-9f64..0.999_999) {
        prop_assert!((bd_cdf(bd_quantile(p)).unwrap() - p).abs() < 1e-12);
    }

    #[test]
    fn correlation_properties(x in prop::collection::vec(-100.0f64..100.0, 3..60), noise in prop::collection::vec(-1.0f64..1.0, 60), a in 0.5f64..3.0, b in -5.0f64..5.0) {
        let y: Vec<f64> = x.iter().zip(&noise).map(|(x, e)| 0.3 * x + e).collect();
        prop_assume!(PairedSeries::new(x.clone(), y.clone()).and_then(|s| pearson_r(&s)).is_ok());
        let s = PairedSeries::new(x.clone(), y.clone()).unwrap();
        let r = pearson_r(&s).unwrap();
        prop_assert!((-1.0..=1.0).contains(&r));
        let swapped = PairedSeries::new(y.clone(), x.clone()).unwrap();
        prop_assert!((pearson_r(&swapped).unwrap() - r).abs() < 1e-12);
        let affine = PairedSeries::new(x.iter().map(|v| a * v + b).collect(), y.clone()).unwrap();
        prop_assert!((pearson_r(&affine).unwrap() - r).abs() < 1e-9);
        let fit = linear_regression(&s).unwrap();
        let fit2 = linear_regression(&affine).unwrap();
        prop_assert!((fit2.slope * a - fit.slope).abs() < 1e-9 * fit.slope.abs().max(1.0));
        let cubed = PairedSeries::new(x.iter().map(|v| v * v * v).collect(), y.clone()).unwrap();
        prop_assert!((spearman_rho(&cubed).unwrap() - spearman_rho(&s).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn roi_text_round_trip(x0 in 0usize..5000, y0 in 0usize..5000, w in 1usize..5000, h in 1usize..5000) {
        let roi = RoiSpec::new(x0, y0, w, h);
        prop_assert_eq!(roi.to_string().parse::<RoiSpec>().unwrap(), roi);
    }

    #[test]
    fn centered_fractions_stay_inside(w in 1usize..800, h in 1usize..800, f in 0.001f64..1.0) {
        let base = RoiSpec::new(7, 3, w, h);
        let sub = base.centered_fraction(f);
        prop_assert!(sub.x0 >= base.x0 && sub.y0 >= base.y0);
        prop_assert!(sub.x0 + sub.width <= base.x0 + base.width);
        prop_assert!(sub.y0 + sub.height <= base.y0 + base.height);
        prop_assert_eq!(base.centered_fraction(1.0), base);
    }

    #[test]
    fn roi_extraction_is_row_major(rows in 1usize..20, cols in 1usize..20, seed in 0u64..1000) {
        let data: Vec<f64> = (0..rows * cols).map(|i| ((i as u64 * 7919 + seed) % 251) as f64).collect();
        let img = PixelMatrix::new(rows, cols, data.clone(), 250.0).unwrap();
        let (x0, y0) = ((seed as usize) % cols, (seed as usize / 3) % rows);
        let roi = RoiSpec::new(x0, y0, cols - x0, rows - y0);
        let s = extract_roi(&img, &roi).unwrap();
        prop_assert_eq!(s.len(), roi.area());
        prop_assert_eq!(s.values()[0], data[y0 * cols + x0]);
        prop_assert_eq!(*s.values().last().unwrap(), data[rows * cols - 1]);
    }

    #[test]
    fn amplitude_csv_round_trip(v in prop::collection::vec(0.0f64..1e6, 1..100)) {
        let s = AmplitudeSample::new(v).unwrap();
        let mut buf = Vec::new();
        write_amplitude_csv(&s, &mut buf).unwrap();
        prop_assert_eq!(parse_amplitude_csv(&buf).unwrap().into_values(), s.into_values());
    }

    #[test]
    fn image_codecs_round_trip(rows in 1usize..12, cols in 1usize..12, seed in 0u64..10_000, wide in any::<bool>()) {
        let bits = if wide { 16 } else { 8 };
        let max = if wide { 65535u32 } else { 255 };
        let pixels: Vec<u16> = (0..rows * cols).map(|i| ((i as u64 * 2654435761 + seed) % (max as u64 + 1)) as u16).collect();
        let mut png = Vec::new();
        encode_png_gray(&mut png, cols, rows, &pixels, bits).unwrap();
        let decoded = decode_png(&png).unwrap();
        prop_assert_eq!((decoded.rows(), decoded.cols()), (rows, cols));
        let as_f64: Vec<f64> = pixels.iter().map(|&p| p as f64).collect();
        prop_assert_eq!(decoded.data(), &as_f64[..]);

        let mut ascii = format!("P2\n# test\n{cols} {rows}\n{max}\n");
        for r in 0..rows {
            let line: Vec<String> = pixels[r * cols..(r + 1) * cols].iter().map(|p| p.to_string()).collect();
            ascii.push_str(&line.join(" "));
            ascii.push('\n');
        }
        prop_assert_eq!(decode_pgm(ascii.as_bytes()).unwrap().data().to_vec(), as_f64.clone());

        let mut binary = format!("P5\n{cols} {rows}\n{max}\n").into_bytes();
        for &p in &pixels {
            if wide { binary.extend_from_slice(&p.to_be_bytes()) } else { binary.push(p as u8) }
        }
        prop_assert_eq!(decode_pgm(&binary).unwrap().data().to_vec(), as_f64.clone());

        let csv: String = (0..rows)
            .map(|r| pixels[r * cols..(r + 1) * cols].iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",") + "\n")
            .collect();
        prop_assert_eq!(decode_csv_matrix(csv.as_bytes()).unwrap().data().to_vec(), as_f64.clone());
    }
}
