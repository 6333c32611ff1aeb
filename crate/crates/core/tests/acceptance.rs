//! End-to-end acceptance checks, run without the libtest harness so that the
//! `criterion N: pass|fail` lines always show.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::time::Instant;

use modsurf::domain::{Region, SubgroupDomain};
use modsurf::experiment::{emit_plot_data, run_experiment, to_csv, ExperimentConfig};
use modsurf::search::{candidate_residual, SearchConfig};
use modsurf::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, pass: bool, detail: String) {
    println!(
        "criterion {n}: {} ({detail})",
        if pass { "pass" } else { "fail" }
    );
}

fn gamma2() -> SubgroupSpec {
    SubgroupSpec::principal(2).unwrap()
}

/// Canonical PSL(2,Z) elements with `a² + d² + b²/4 + 4c² ≤ bound`, which is
/// `2 cosh d(2i, g·2i)` for determinant one.
fn brute_force_ball_at_2i(bound: f64) -> BTreeSet<(i64, i64, i64, i64)> {
    let r = bound.sqrt().ceil() as i64;
    let mut out = BTreeSet::new();
    for c in 0..=r {
        for d in -r..=r {
            if c == 0 && d <= 0 {
                continue;
            }
            for a in -r..=r {
                for b in -2 * r..=2 * r {
                    if a * d - b * c != 1 {
                        continue;
                    }
                    let v = (a * a + d * d + 4 * c * c) as f64 + (b * b) as f64 / 4.0;
                    if v <= bound {
                        out.insert((a, b, c, d));
                    }
                }
            }
        }
    }
    out
}

fn criterion_1_constants() -> bool {
    let k = CoverConstants::modular();
    let s3 = 3f64.sqrt();
    let rho = UHPoint::float(-0.5, s3 / 2.0).unwrap();
    let top = UHPoint::float(0.5, 2.0).unwrap();
    let diam = cosh_distance(&rho, &top).cosh();
    let rho1 = UHPoint::float(0.5, s3 / 2.0).unwrap();
    let r0 = cosh_distance(&UHPoint::ints(0, 2), &rho1).cosh();
    let area_fo = Region::central().area().unwrap();
    let a = (23.0 * s3 / 24.0).acosh();
    let b = (5.0 * s3 / 6.0).acosh();
    let disc = disc_area(a + 3.0 * b).unwrap();
    let closed_disc = PI / 36.0 * (848.0 + 11.0 * 4381f64.sqrt());
    let ratio = disc / area_fo;
    let checks = [
        (diam - 23.0 * s3 / 24.0).abs() <= 1e-12,
        (k.cosh_diam_fo - diam).abs() <= 1e-12,
        (r0 - 5.0 * s3 / 6.0).abs() <= 1e-12,
        (k.cosh_r0 - r0).abs() <= 1e-12,
        (area_fo - (PI / 3.0 - 0.5)).abs() <= 1e-12,
        (disc - closed_disc).abs() <= 1e-6,
        (k.disc_area_numeric() - closed_disc).abs() <= 1e-6,
        ratio.floor() <= 252.0,
        k.area_ratio().floor() as u32 <= k.area_bound,
    ];
    let pass = checks.iter().all(|&c| c);
    report(1, pass, format!("disc area {disc:.9}, ratio {ratio:.4}"));
    pass
}

fn criterion_2_central_cover_size_and_oracle() -> bool {
    let full = SubgroupSpec::full();
    let cover = cover_fo(&full).unwrap();
    let threshold = CoverConstants::modular().cover_threshold();
    let query = BallQuery::new(
        full.clone(),
        UHPoint::ints(0, 2),
        UHPoint::ints(0, 2),
        threshold,
    );
    let bfs: BTreeSet<_> = enumerate_ball_bfs_oracle(&query, 40)
        .unwrap()
        .iter()
        .map(|g| g.sort_key())
        .collect();
    let swept: BTreeSet<_> = cover.elements.iter().map(|g| g.sort_key()).collect();
    let brute: BTreeSet<_> = brute_force_ball_at_2i(2.0 * threshold)
        .into_iter()
        .map(|(a, b, c, d)| (c, d, a, b))
        .collect();
    let pass = cover.len() <= 252 && swept == bfs && swept == brute;
    report(
        2,
        pass,
        format!(
            "|cover| = {}, bfs = {}, brute force = {}",
            cover.len(),
            bfs.len(),
            brute.len()
        ),
    );
    pass
}

fn criterion_3_covers_verified() -> bool {
    let full = SubgroupSpec::full();
    let g2 = gamma2();
    let covers = [
        cover_fu(&full),
        cover_fu(&g2),
        cover_fo(&full).unwrap(),
        cover_fo(&g2).unwrap(),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for cover in &covers {
        let t = Instant::now();
        let r = verify_cover(cover, 1000, 7).unwrap();
        pass &= r.pass && r.failures == 0 && r.pairs_checked >= 1000;
        detail.push(format!(
            "{} {}: {} pairs, {} failures, {:.1}s",
            cover.spec,
            cover.region.name(),
            r.pairs_checked,
            r.failures,
            t.elapsed().as_secs_f64()
        ));
    }
    report(3, pass, detail.join("; "));
    pass
}

fn criterion_4_generic_central_cover() -> bool {
    let full = SubgroupSpec::full();
    let cover = cover_central_generic(&full, &Region::central(), &UHPoint::ints(0, 2)).unwrap();
    let r = verify_cover(&cover, 1000, 7).unwrap();
    let pass = r.pass && r.failures == 0 && r.uncovered_minimizers == 0;
    report(
        4,
        pass,
        format!(
            "|cover| = {}, {} pairs, uncovered minimisers {}",
            cover.len(),
            r.pairs_checked,
            r.uncovered_minimizers
        ),
    );
    pass
}

fn criterion_5_principal_level_two_domain() -> bool {
    let g2 = gamma2();
    let reps = g2.coset_representatives();
    let mut inequivalent = true;
    for (i, a) in reps.iter().enumerate() {
        for b in &reps[i + 1..] {
            let q = a.compose(&b.inverse()).unwrap();
            let [w, x, y, z] = q.entries();
            // Γ(2): entries ≡ ±identity mod 2, and mod 2 the sign is invisible.
            let in_gamma2 = w.rem_euclid(2) == 1
                && z.rem_euclid(2) == 1
                && x.rem_euclid(2) == 0
                && y.rem_euclid(2) == 0;
            inequivalent &= !in_gamma2;
        }
    }
    let area = SubgroupDomain::new(&g2).area();
    let pass =
        g2.index() == 6 && reps.len() == 6 && inequivalent && (area - 2.0 * PI).abs() <= 1e-9;
    report(5, pass, format!("index {}, area {area:.12}", g2.index()));
    pass
}

fn independent_histogram(points: &[UHPoint], spec: &SubgroupSpec) -> BTreeMap<ExactKey, u64> {
    let mut keys = BTreeMap::new();
    let mut reps: Vec<UHPoint> = Vec::new();
    for p in points {
        if !reps
            .iter()
            .any(|q| surface_distance_oracle(p, q, spec).unwrap().is_zero())
        {
            reps.push(p.clone());
        }
    }
    for (i, p) in reps.iter().enumerate() {
        for q in &reps[i + 1..] {
            let k = surface_distance_oracle(p, q, spec).unwrap();
            *keys.entry(k.exact().unwrap().clone()).or_insert(0) += 2;
        }
    }
    keys
}

fn criterion_6_energy_identities() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let config = SamplerConfig::default();
    let mut pass = true;
    let mut sets = 0;
    let mut cross_checked = 0;
    for spec in [SubgroupSpec::full(), gamma2()] {
        for _ in 0..50 {
            let n = rng.gen_range(3..=200);
            let points = sample_points(&spec, n, &config, rng.gen()).unwrap();
            let s = distance_stats(&points, &spec).unwrap();
            let n = s.n as u128;
            let sum: u128 = s.multiplicities.iter().map(|m| m.1 as u128).sum();
            let q: u128 = s.multiplicities.iter().map(|m| (m.1 as u128).pow(2)).sum();
            let ok = s.ordered_pairs as u128 == n * n - n
                && sum == n * n - n
                && s.quadruples == q
                && s.distinct == s.multiplicities.len()
                && s.cauchy_schwarz_holds()
                && (s.distinct as u128) * q >= (n * n - n).pow(2);
            pass &= ok;
            if points.len() <= 40 {
                let h = independent_histogram(&points, &spec);
                let mut ours: Vec<u64> = s.multiplicities.iter().map(|m| m.1).collect();
                let mut theirs: Vec<u64> = h.values().copied().collect();
                ours.sort_unstable();
                theirs.sort_unstable();
                pass &= ours == theirs;
                cross_checked += 1;
            }
            sets += 1;
        }
    }
    report(
        6,
        pass,
        format!("{sets} sets, {cross_checked} cross-checked pairwise"),
    );
    pass
}

fn criterion_7_experiment_sweep() -> bool {
    let mut pass = true;
    let mut detail = Vec::new();
    for group in ["full", "gamma:2"] {
        let config = ExperimentConfig::new(group, 64, 4096);
        let t = Instant::now();
        let rows = run_experiment(&config).unwrap();
        let secs = t.elapsed().as_secs_f64();
        let csv = to_csv(&rows);
        let again = to_csv(&run_experiment(&ExperimentConfig::new(group, 64, 512)).unwrap());
        let prefix: String = csv.lines().take(2 + 4).map(|l| format!("{l}\n")).collect();
        let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        pass &= rows.len() == 7
            && min_ratio >= 0.5
            && again == prefix
            && emit_plot_data(&rows).lines().count() == 9;
        detail.push(format!("{group}: min ratio {min_ratio:.3}, {secs:.1}s"));
        for r in &rows {
            println!(
                "  {group} n={} distinct={} ratio={:.4}",
                r.n, r.distinct, r.ratio
            );
        }
    }
    report(7, pass, detail.join("; "));
    pass
}

fn criterion_8_equilateral_configurations() -> bool {
    let config = SearchConfig::default();
    let mut pass = true;
    let mut detail = Vec::new();
    for (spec, d) in [(SubgroupSpec::full(), 0.5), (gamma2(), 1.0)] {
        let found = equilateral_search(&spec, 3, d, &config).unwrap();
        let ok = match &found {
            Some(c) => {
                let r = candidate_residual(&spec, &c.points, 2.0 * d.cosh()).unwrap();
                c.residual <= 1e-10 && r <= 1e-10 && c.points.len() == 3
            }
            None => false,
        };
        pass &= ok;
        detail.push(format!(
            "{spec} k=3 d={d}: {}",
            if ok { "found" } else { "missing" }
        ));
    }
    for spec in [SubgroupSpec::full(), gamma2()] {
        for d in [0.3, 1.0, 2.5] {
            let c = equilateral_search(&spec, 2, d, &config).unwrap();
            pass &= c.is_some_and(|c| {
                candidate_residual(&spec, &c.points, 2.0 * d.cosh()).unwrap() <= 1e-10
            });
        }
    }
    report(8, pass, detail.join("; "));
    pass
}

fn criterion_9_ball_enumeration_matches_words() -> bool {
    let xs = [(-2, 5), (-1, 5), (0, 1), (1, 5), (2, 5)];
    let ys = [(1, 1), (5, 4), (3, 2), (2, 1), (3, 1)];
    let grid: Vec<UHPoint> = ys
        .iter()
        .flat_map(|&(yn, yd)| {
            xs.iter()
                .map(move |&(xn, xd)| UHPoint::ratio(xn, xd, yn, yd))
        })
        .collect();
    let mut pass = true;
    let mut total = 0;
    for (k, p) in grid.iter().enumerate() {
        let q = &grid[(7 * k + 3) % grid.len()];
        let h = (1.0 + 3.0 * k as f64 / 24.0).cosh();
        for spec in [SubgroupSpec::full(), gamma2()] {
            let query = BallQuery::new(spec, p.clone(), q.clone(), h);
            let fast = enumerate_ball(&query).unwrap();
            let slow = enumerate_ball_bfs_oracle(&query, 40).unwrap();
            pass &= fast == slow;
            total += fast.len();
        }
    }
    report(9, pass, format!("25 queries per group, {total} elements"));
    pass
}

fn main() {
    let checks: [fn() -> bool; 9] = [
        criterion_1_constants,
        criterion_2_central_cover_size_and_oracle,
        criterion_3_covers_verified,
        criterion_4_generic_central_cover,
        criterion_5_principal_level_two_domain,
        criterion_6_energy_identities,
        criterion_7_experiment_sweep,
        criterion_8_equilateral_configurations,
        criterion_9_ball_enumeration_matches_words,
    ];
    let mut failed = 0;
    for (i, check) in checks.iter().enumerate() {
        match std::panic::catch_unwind(check) {
            Ok(true) => {}
            Ok(false) => failed += 1,
            Err(_) => {
                println!("criterion {}: fail (panicked)", i + 1);
                failed += 1;
            }
        }
    }
    println!(
        "acceptance: {} of {} passed",
        checks.len() - failed,
        checks.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
