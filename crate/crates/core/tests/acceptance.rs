//! Acceptance gate: one test per release criterion, each printing a single
//! PASS/FAIL line (visible with `--nocapture`).

use std::time::Instant;

use ezf_core::channel::{
    derive_seed, generate_channels, ChannelKind, ChannelModel, ChannelSet, SystemConfig,
};
use ezf_core::equalizer::{approx_equalizers, bcu_metrics, exact_equalizers, strongest_bcu};
use ezf_core::fronthaul::{analytic_load, paper_table_base, table_report, Sweep};
use ezf_core::mcsim::{ber_sweep, BerPoint};
use ezf_core::numerics::{self, C64, CMat};
use ezf_core::{busnet, precoder, Scheme};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fro(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn verdict(name: &str, pass: bool, detail: &str) {
    println!(
        "acceptance: {name} ... {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{name}: {detail}");
}

fn gains(rows: &[Result<ezf_core::fronthaul::LoadReport, (String, ezf_core::Error)>], scheme: &str) -> Vec<f64> {
    rows.iter()
        .filter_map(|r| r.as_ref().ok())
        .filter(|r| r.scheme == scheme)
        .map(|r| r.gain_percent)
        .collect()
}

#[test]
fn table_1_reproduction() {
    let t0 = Instant::now();
    let rows = table_report(&paper_table_base(), &Sweep::Users(vec![16, 24, 32, 36]));
    let apd = gains(&rows, "APD");
    let dezf = gains(&rows, "DEZF");
    let ok = apd == vec![74.33, 52.26, 24.04, 7.62]
        && dezf == vec![68.27, 40.87, 5.77, -14.66]
        && t0.elapsed().as_secs_f64() < 1.0;
    verdict(
        "table-1 relative gains",
        ok,
        &format!("APD {:?} DEZF {:?} in {:.3}s", apd, dezf, t0.elapsed().as_secs_f64()),
    );
}

#[test]
fn table_2_reproduction() {
    let t0 = Instant::now();
    let rows = table_report(
        &paper_table_base(),
        &Sweep::Clusters(vec![(4, 64), (8, 32), (16, 16)]),
    );
    let apd = gains(&rows, "APD");
    let dezf = gains(&rows, "DEZF");
    let ok = apd == vec![74.33, 61.83, 36.83]
        && dezf == vec![68.27, 52.88, 22.12]
        && t0.elapsed().as_secs_f64() < 1.0;
    verdict(
        "table-2 relative gains",
        ok,
        &format!("APD {:?} DEZF {:?} in {:.3}s", apd, dezf, t0.elapsed().as_secs_f64()),
    );
}

fn table_configs() -> Vec<SystemConfig> {
    let base = paper_table_base();
    let mut out = Vec::new();
    for k in [16, 24, 32, 36] {
        out.push(SystemConfig { k, ..base });
    }
    for (p, m) in [(8, 32), (16, 16)] {
        out.push(SystemConfig { p, m, ..base });
    }
    out.push(base); // (4, 64) with K = 16 appears in both sweeps
    out
}

fn random_config(rng: &mut ChaCha8Rng) -> SystemConfig {
    let p = rng.gen_range(1..=8usize);
    let m = rng.gen_range(1..=8usize);
    let n_t = p * m;
    let n_r = rng.gen_range(1..=4usize);
    let l = rng.gen_range(1..=n_r.min(n_t));
    let k = rng.gen_range(1..=(n_t / l).clamp(1, 8));
    let tau = rng.gen_range(0..=40usize);
    SystemConfig {
        n_t,
        p,
        m,
        k,
        n_r,
        l,
        tau,
        p_bs: 1.0,
        sigma2_n: 1.0,
    }
}

#[test]
fn ledger_matches_formulas() {
    let t0 = Instant::now();
    let mut cfgs = table_configs();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    while cfgs.len() < 7 + 50 {
        cfgs.push(random_config(&mut rng));
    }
    let mut worst = 0u64;
    for (i, cfg) in cfgs.iter().enumerate() {
        let ch = generate_channels(
            cfg,
            &ChannelModel {
                kind: ChannelKind::IidRayleigh,
                seed: derive_seed(103, i as u64, 0),
            },
        )
        .unwrap();
        let (_, cen) = busnet::run_centralized(&ch, cfg).unwrap();
        let (_, apd) = busnet::run_apd(&ch, cfg).unwrap();
        let (_, dezf) = busnet::run_dezf(&ch, cfg).unwrap();
        for (scheme, ledger) in [
            (Scheme::Cen, cen),
            (Scheme::Apd, apd),
            (Scheme::Dezf, dezf),
        ] {
            let formula = analytic_load(scheme, cfg).unwrap();
            worst = worst.max(ledger.total().abs_diff(formula));
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    verdict(
        "ledger equals closed form",
        worst == 0 && secs < 30.0,
        &format!("max |ledger − formula| = {worst} over {} configs in {secs:.2}s", cfgs.len()),
    );
}

/// Valid desk-scale shapes with N_T ≤ 64, K ≤ 8, N_R = 4, L = 2.
fn desk_instance(i: usize) -> (SystemConfig, ChannelSet) {
    let shapes = [(1usize, 16usize), (2, 8), (2, 16), (4, 8), (4, 16), (8, 8)];
    let (p, m) = shapes[i % shapes.len()];
    let n_t = p * m;
    let k = 2 + i % ((n_t / 2).min(8) - 1);
    let cfg = SystemConfig {
        n_t,
        p,
        m,
        k,
        n_r: 4,
        l: 2,
        tau: 1,
        p_bs: 1.0,
        sigma2_n: 1.0,
    };
    let ch = generate_channels(
        &cfg,
        &ChannelModel {
            kind: ChannelKind::IidRayleigh,
            seed: derive_seed(107, i as u64, 0),
        },
    )
    .unwrap();
    (cfg, ch)
}

fn scheme_effective_and_precoder(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    scheme: Scheme,
) -> (precoder::EffectiveChannel, precoder::Precoder) {
    let bank = match scheme {
        Scheme::Apd => {
            let strongest = strongest_bcu(&bcu_metrics(ch));
            approx_equalizers(ch, &strongest, cfg.l).unwrap()
        }
        Scheme::Dezf => {
            let grams: Vec<CMat> = (0..cfg.k)
                .map(|k| &ch.users[k] * ch.users[k].adjoint())
                .collect();
            ezf_core::equalizer::exact_equalizers_via_gram(&grams, cfg.l).unwrap()
        }
        _ => exact_equalizers(ch, cfg.l).unwrap(),
    };
    let eff = precoder::effective_channel(ch, &bank).unwrap();
    let grams = precoder::gram_accumulate(&eff).unwrap();
    let pre = precoder::ezf_precoder(&eff, &grams, scheme).unwrap();
    (eff, pre)
}

#[test]
fn diagonalization_invariant() {
    let mut worst_off = 0.0f64;
    let mut worst_norm = 0.0f64;
    for i in 0..100 {
        let (cfg, ch) = desk_instance(i);
        for scheme in [Scheme::Cen, Scheme::Apd, Scheme::Dezf] {
            let (eff, pre) = scheme_effective_and_precoder(&cfg, &ch, scheme);
            let cw = &eff.c * &pre.w;
            let l_tot = cfg.l_tot();
            let max_diag = (0..l_tot).map(|j| cw[(j, j)].norm()).fold(0.0, f64::max);
            for r in 0..l_tot {
                for c in 0..l_tot {
                    if r != c {
                        worst_off = worst_off.max(cw[(r, c)].norm() / (1e-9 * max_diag));
                    }
                }
            }
            for c in 0..l_tot {
                let n: f64 = pre.w.column(c).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                worst_norm = worst_norm.max((n - 1.0).abs());
            }
        }
    }
    verdict(
        "perfect IUI cancellation",
        worst_off <= 1.0 && worst_norm <= 1e-12,
        &format!("worst off-diag {worst_off:.3e}× tolerance, worst |colnorm − 1| = {worst_norm:.3e}"),
    );
}

#[test]
fn degeneration_equivalences() {
    let mut worst_apd = 0.0f64;
    let mut worst_dezf = 0.0f64;
    for i in 0..100 {
        // Single-cluster instances: APD has no approximation left.
        let k = 2 + i % 7;
        let cfg = SystemConfig {
            n_t: 32,
            p: 1,
            m: 32,
            k,
            n_r: 4,
            l: 2,
            tau: 1,
            p_bs: 1.0,
            sigma2_n: 1.0,
        };
        let ch = generate_channels(
            &cfg,
            &ChannelModel {
                kind: ChannelKind::IidRayleigh,
                seed: derive_seed(109, i as u64, 0),
            },
        )
        .unwrap();
        let (_, cen) = scheme_effective_and_precoder(&cfg, &ch, Scheme::Cen);
        let (_, apd) = scheme_effective_and_precoder(&cfg, &ch, Scheme::Apd);
        let diff = &apd.w - &cen.w;
        worst_apd = worst_apd.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    for i in 0..100 {
        let (cfg, ch) = desk_instance(i);
        let (_, cen) = scheme_effective_and_precoder(&cfg, &ch, Scheme::Cen);
        let (_, dezf) = scheme_effective_and_precoder(&cfg, &ch, Scheme::Dezf);
        let diff = &dezf.w - &cen.w;
        worst_dezf = worst_dezf.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    verdict(
        "degenerate cases collapse to centralized",
        worst_apd <= 1e-9 && worst_dezf <= 1e-10,
        &format!("APD(P=1) max |ΔW| = {worst_apd:.3e}, DEZF max |ΔW| = {worst_dezf:.3e}"),
    );
}

const BER_GRID: [f64; 8] = [14.0, 15.5, 17.0, 18.5, 20.0, 21.5, 23.0, 24.5];
const BER_TRIALS: usize = 481; // 481 × τ=65 × 16 streams × 4 bits ≈ 2.0e6 bits/point

fn desk_ber_cfg(p: usize, m: usize) -> SystemConfig {
    SystemConfig {
        n_t: 64,
        p,
        m,
        k: 8,
        n_r: 4,
        l: 2,
        tau: 65,
        p_bs: 1.0,
        sigma2_n: 1.0,
    }
}

fn curves_match(a: &[BerPoint], b: &[BerPoint]) -> (bool, f64) {
    // Two estimates are compatible when they differ by less than three times
    // the sum of their 95% radii.
    let mut worst = 0.0f64;
    let mut ok = true;
    for (x, y) in a.iter().zip(b) {
        let tol = 3.0 * (x.ci95 + y.ci95);
        let d = (x.ber - y.ber).abs();
        if tol > 0.0 {
            worst = worst.max(d / tol);
        }
        ok &= d <= tol || (x.errors == 0 && y.errors == 0);
    }
    (ok, worst)
}

#[test]
fn ber_properties() {
    let t0 = Instant::now();
    let cfg = desk_ber_cfg(4, 16);
    let sweep = ber_sweep(
        &cfg,
        &[Scheme::Cen, Scheme::Dezf, Scheme::Apd, Scheme::Fd],
        &BER_GRID,
        ChannelKind::IidRayleigh,
        BER_TRIALS,
        20260823,
    )
    .unwrap();
    let cen = &sweep.curves[0].points;
    let dezf = &sweep.curves[1].points;
    let apd = &sweep.curves[2].points;
    let fd = &sweep.curves[3].points;
    assert!(cen[0].bits >= 2_000_000);

    // (a) the three diagonalizing schemes agree within statistical tolerance
    let (ok_cd, w_cd) = curves_match(cen, dezf);
    let (ok_ca, w_ca) = curves_match(cen, apd);
    let (ok_da, w_da) = curves_match(dezf, apd);
    verdict(
        "BER (a) CEN/DEZF/APD statistically indistinguishable",
        ok_cd && ok_ca && ok_da,
        &format!("worst |Δ|/tol: CEN-DEZF {w_cd:.2}, CEN-APD {w_ca:.2}, DEZF-APD {w_da:.2}"),
    );

    // (b) FD is strictly worse than APD over the mid-to-high power half
    let mut ok_b = true;
    let mut margin = f64::INFINITY;
    for i in 4..8 {
        let bound = 3.0 * (fd[i].ci95 + apd[i].ci95);
        let gap = fd[i].ber - apd[i].ber;
        ok_b &= gap > bound;
        margin = margin.min(gap / bound.max(1e-300));
    }
    verdict(
        "BER (b) FD worse than APD at mid-to-high power",
        ok_b,
        &format!("min gap/bound = {margin:.2}"),
    );

    // (c) FD error floor when M < L_tot
    let cfg_floor = desk_ber_cfg(8, 8);
    let floor = ber_sweep(
        &cfg_floor,
        &[Scheme::Fd],
        &[BER_GRID[7]],
        ChannelKind::IidRayleigh,
        BER_TRIALS,
        20260823,
    )
    .unwrap();
    let p = &floor.curves[0].points[0];
    verdict(
        "BER (c) FD error floor with M < L_tot",
        p.ber > 1e-2,
        &format!("BER = {:.3e} at {} dB", p.ber, p.power_db),
    );

    // (d) noiseless transmission is error-free for the diagonalizing schemes
    let cfg_clean = SystemConfig {
        sigma2_n: 0.0,
        ..desk_ber_cfg(4, 16)
    };
    let clean = ber_sweep(
        &cfg_clean,
        &[Scheme::Cen, Scheme::Dezf, Scheme::Apd],
        &[BER_GRID[0]],
        ChannelKind::IidRayleigh,
        BER_TRIALS,
        20260823,
    )
    .unwrap();
    let errors: u64 = clean
        .curves
        .iter()
        .flat_map(|c| c.points.iter().map(|p| p.errors))
        .sum();
    verdict(
        "BER (d) noiseless override is error-free",
        errors == 0,
        &format!("total errors = {errors}"),
    );
    println!(
        "acceptance: BER block finished in {:.1}s ({} redraws)",
        t0.elapsed().as_secs_f64(),
        sweep.redraws
    );
    assert!(t0.elapsed().as_secs_f64() < 600.0);
}

#[test]
fn numerics_suite() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(113);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let r = rng.gen_range(1..=64usize);
        let c = rng.gen_range(1..=64usize);
        let a = CMat::from_fn(r, c, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let scale = fro(&a) + 1.0;

        let dec = numerics::svd(&a).unwrap();
        let dec2 = numerics::svd(&a).unwrap();
        assert_eq!(dec.u, dec2.u, "SVD not bit-deterministic at case {i}");
        assert_eq!(dec.v, dec2.v);
        let mut s = CMat::zeros(r, c);
        for j in 0..r.min(c) {
            s[(j, j)] = C64::new(dec.singular_values[j], 0.0);
        }
        worst = worst.max(fro(&(&dec.u * s * dec.v.adjoint() - &a)) / (1e-9 * scale));
        worst = worst.max(fro(&(dec.u.adjoint() * &dec.u - CMat::identity(r, r))) / 1e-9);
        worst = worst.max(fro(&(dec.v.adjoint() * &dec.v - CMat::identity(c, c))) / 1e-9);

        let g = &a * a.adjoint();
        let eig = numerics::hermitian_eig(&g).unwrap();
        let lam = CMat::from_fn(r, r, |x, y| {
            if x == y {
                C64::new(eig.eigenvalues[x], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let rebuilt = &eig.eigenvectors * lam * eig.eigenvectors.adjoint();
        worst = worst.max(fro(&(&rebuilt - &g)) / (1e-9 * (fro(&g) + 1.0)));

        let pinv = numerics::pinv(&a, numerics::PINV_DEFAULT_TOL).unwrap();
        worst = worst.max(fro(&(&a * &pinv * &a - &a)) / (1e-9 * scale));
        worst = worst.max(fro(&(&pinv * &a * &pinv - &pinv)) / (1e-9 * (fro(&pinv) + 1.0)));
        let ap = &a * &pinv;
        let pa = &pinv * &a;
        worst = worst.max(fro(&(&ap - ap.adjoint())) / 1e-9);
        worst = worst.max(fro(&(&pa - pa.adjoint())) / 1e-9);
    }
    let secs = t0.elapsed().as_secs_f64();
    verdict(
        "numerics round-trips and residuals",
        worst <= 1.0 && secs < 30.0,
        &format!("worst residual {worst:.3}× tolerance in {secs:.2}s"),
    );
}
