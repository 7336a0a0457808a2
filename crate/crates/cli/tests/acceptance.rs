//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_bigint::BigUint;
use slicelab::census::{chebyshev_check, fit_exponent, full_census, BadLocusCensus, Classifier};
use slicelab::constructions::{lookup, standard_catalog};
use slicelab::geometry::{enumerate_projective_points, gaussian_binomial};
use slicelab::rational::ratio;
use slicelab::stats::{exact_statistics, slice_distribution, verify_lemma};
use slicelab::variety::default_tau;
use slicelab::{make_field, Budget, Grassmannian};
use slicelab_cli::{comparable, execute, Command, ExperimentConfig};

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn lemma_identities() -> Outcome {
    let start = Instant::now();
    let budget = Budget(10_000_000);
    let (mut runs, mut skipped) = (0, 0);
    for e in standard_catalog() {
        for p in [2u64, 3, 5] {
            let f = make_field(p, 1).unwrap();
            let x = e
                .instantiate(&f)
                .map_err(|err| format!("{}: {err}", e.name))?;
            for k in 1..x.n() {
                match verify_lemma(&x, &f, k, budget) {
                    Ok(rep) => {
                        rep.ensure()
                            .map_err(|err| format!("{} q={p} k={k}: {err}", e.name))?;
                        runs += 1;
                    }
                    Err(slicelab::Error::BudgetExceeded { .. }) => skipped += 1,
                    Err(err) => return Err(format!("{} q={p} k={k}: {err}", e.name)),
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 120.0, format!("took {secs:.1}s"))?;
    Ok(format!(
        "{runs} cases exact, {skipped} over budget, {secs:.1}s"
    ))
}

fn conic_gold() -> Outcome {
    let f = make_field(2, 1).unwrap();
    let x = lookup("conic-p2").unwrap().instantiate(&f).unwrap();
    let d = slice_distribution(&x, &f, 1, Budget::default()).map_err(|e| e.to_string())?;
    check(
        d.histogram == BTreeMap::from([(0, 1), (1, 3), (2, 3)]),
        format!("histogram {:?}", d.histogram),
    )?;
    let st = exact_statistics(&d, 3);
    check(st.mu == ratio(9, 7), format!("mu = {}", st.mu))?;
    check(st.b == ratio(6, 7), format!("B = {}", st.b))?;
    check(
        st.sigma2 == ratio(24, 49),
        format!("sigma2 = {}", st.sigma2),
    )?;
    Ok("histogram {0:1, 1:3, 2:3}, mu 9/7, B 6/7, sigma2 24/49".into())
}

fn incidence() -> Outcome {
    let mut checked = 0;
    for p in [2u64, 3] {
        let f = make_field(p, 1).unwrap();
        for n in 1..=3usize {
            let pts = enumerate_projective_points(n, &f).unwrap();
            for k in 1..=n {
                let g = Grassmannian::new(n, k, &f).unwrap();
                let singles: BTreeSet<u64> = pts
                    .iter()
                    .map(|a| g.count_through_points(std::slice::from_ref(a)).unwrap())
                    .collect();
                check(
                    singles.len() == 1,
                    format!("n={n} k={k} q={p}: {singles:?}"),
                )?;
                let mut pairs = BTreeSet::new();
                for (i, a) in pts.iter().enumerate() {
                    for b in &pts[i + 1..] {
                        pairs.insert(g.count_through_points(&[a.clone(), b.clone()]).unwrap());
                    }
                }
                check(
                    pairs.len() <= 1,
                    format!("pairs n={n} k={k} q={p}: {pairs:?}"),
                )?;
                checked += 1;
            }
        }
    }
    for p in [2u64, 3, 5] {
        let f = make_field(p, 1).unwrap();
        for n in 1..=4usize {
            for k in 1..=n {
                let g = Grassmannian::new(n, k, &f).unwrap();
                let all = g.par_subspaces();
                let distinct: BTreeSet<_> = all.iter().map(|h| h.equations().to_vec()).collect();
                let expected = gaussian_binomial(n + 1, k, p);
                check(
                    BigUint::from(all.len()) == expected && distinct.len() == all.len(),
                    format!("G n={n} k={k} q={p}: {} vs {expected}", all.len()),
                )?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} incidence and enumeration cases"))
}

/// Every full census in the suite, collected for the Chebyshev criterion.
fn catalog_censuses() -> Result<Vec<BadLocusCensus>, String> {
    let mut out = Vec::new();
    for e in standard_catalog() {
        for p in [3u64, 5] {
            let f = make_field(p, 1).unwrap();
            let x = e.instantiate(&f).unwrap();
            for k in 1..x.n() {
                if x.declared_dim() < k {
                    continue;
                }
                let quadric = Classifier::QuadricExact;
                let est = Classifier::ComponentEstimate {
                    ext_degrees: vec![1, 2],
                };
                let classifier = if quadric.check(&x, &f, k).is_ok() {
                    quadric
                } else {
                    est
                };
                match full_census(&x, &f, k, &classifier, Budget(10_000_000)) {
                    Ok(c) => out.push(c),
                    Err(slicelab::Error::BudgetExceeded { .. }) => {}
                    Err(err) => return Err(format!("{} q={p} k={k}: {err}", e.name)),
                }
            }
        }
    }
    Ok(out)
}

fn chebyshev(extra: &[BadLocusCensus]) -> Outcome {
    let mut all = catalog_censuses()?;
    all.extend_from_slice(extra);
    for c in &all {
        let rep = chebyshev_check(c);
        check(
            rep.holds,
            format!(
                "n={} k={} q={}: {} deviations",
                c.n, c.k, c.q, c.deviation_count
            ),
        )?;
    }
    Ok(format!(
        "{} censuses, deviation/total <= 1/t^2 in all",
        all.len()
    ))
}

fn component_known_answers() -> Outcome {
    let f = make_field(3, 1).unwrap();
    let est = |name: &str, ms: &[u32]| {
        lookup(name)
            .unwrap()
            .instantiate(&f)
            .unwrap()
            .estimate_components(&f, ms, &default_tau(), Budget::default())
            .unwrap()
    };
    let conic = est("conic-p2", &[1, 2]);
    check(conic.a_est == 1, format!("conic a = {}", conic.a_est))?;
    let split = est("split-pair-p2", &[1, 2]);
    check(split.a_est == 2, format!("split pair a = {}", split.a_est))?;
    let conj = est("conjugate-pair-p2", &[1, 2, 4]);
    check(
        conj.counts == vec![(1, 1), (2, 19), (4, 163)],
        format!("conjugate counts {:?}", conj.counts),
    )?;
    check(
        conj.a_est == 0 && conj.g_est == Some(2),
        format!("conjugate a = {}, g = {:?}", conj.a_est, conj.g_est),
    )?;
    Ok("conic a=1, split a=2, conjugate a=0 g=2 with N = 1, 19, 163".into())
}

fn sharpness_k1(keep: &mut Vec<BadLocusCensus>) -> Outcome {
    let mut samples = Vec::new();
    for p in [3u64, 5, 7] {
        let f = make_field(p, 1).unwrap();
        let x = lookup("quadric-cone-p3").unwrap().instantiate(&f).unwrap();
        let c = full_census(&x, &f, 1, &Classifier::QuadricExact, Budget::default())
            .map_err(|e| e.to_string())?;
        check(
            c.very_bad_count == p * p,
            format!("q={p}: {}", c.very_bad_count),
        )?;
        samples.push((p, c.very_bad_count));
        keep.push(c);
    }
    let fit = fit_exponent(&samples, 2).map_err(|e| e.to_string())?;
    check(
        fit.residual <= 0.01,
        format!("exponent {:.4}", fit.exponent),
    )?;
    Ok(format!(
        "counts 9, 25, 49; exponent {:.4} vs 2",
        fit.exponent
    ))
}

fn sharpness_k2(keep: &mut Vec<BadLocusCensus>) -> Outcome {
    let start = Instant::now();
    let golden = [(3u64, 1210u64, 324u64), (5, 20306, 3750)];
    let mut samples = Vec::new();
    for (p, total, bad) in golden {
        let f = make_field(p, 1).unwrap();
        let x = lookup("quadric-cone-p4").unwrap().instantiate(&f).unwrap();
        let c = full_census(&x, &f, 2, &Classifier::QuadricExact, Budget::default())
            .map_err(|e| e.to_string())?;
        check(c.total == total, format!("q={p}: {} subspaces", c.total))?;
        check(
            c.very_bad_count == bad,
            format!("q={p}: very bad {}", c.very_bad_count),
        )?;
        samples.push((p, c.very_bad_count));
        keep.push(c);
    }
    let fit = fit_exponent(&samples, 5).map_err(|e| e.to_string())?;
    check(fit.residual <= 0.5, format!("exponent {:.4}", fit.exponent))?;
    let secs = start.elapsed().as_secs_f64();
    check(secs < 60.0, format!("took {secs:.1}s"))?;
    Ok(format!(
        "1210 -> 324, 20306 -> 3750; exponent {:.4} vs 5, {secs:.1}s",
        fit.exponent
    ))
}

fn cli_config(command: Command, extra: impl FnOnce(&mut ExperimentConfig)) -> ExperimentConfig {
    let mut c = ExperimentConfig {
        command: Some(command),
        variety: Some("quadric-cone-p3".into()),
        ..Default::default()
    };
    extra(&mut c);
    c
}

fn run_cli(flags: ExperimentConfig) -> Result<slicelab_cli::RunOutcome, String> {
    let (config, runtime) = ExperimentConfig::resolve(flags, ExperimentConfig::default(), None)
        .map_err(|e| e.to_string())?;
    execute(&config, &runtime).map_err(|e| e.to_string())
}

fn monte_carlo() -> Outcome {
    let flags = cli_config(Command::Sample, |c| {
        c.fields = vec!["7".into()];
        c.samples = Some(2000);
        c.seed = Some(20240611);
    });
    let a = run_cli(flags.clone())?;
    let b = run_cli(flags)?;
    check(comparable(&a.json) == comparable(&b.json), "reruns differ")?;
    let r = &a.json["results"][0];
    let lo = r["interval"][0].as_f64().unwrap();
    let hi = r["interval"][1].as_f64().unwrap();
    let truth = 49.0 / 400.0;
    check(
        lo <= truth && truth <= hi,
        format!("[{lo:.4}, {hi:.4}] misses {truth}"),
    )?;
    Ok(format!(
        "fraction {:.4}, Wilson [{lo:.4}, {hi:.4}] contains 0.1225; reruns identical",
        r["fraction"].as_f64().unwrap()
    ))
}

fn determinism() -> Outcome {
    let configs = [
        cli_config(Command::Sample, |c| {
            c.fields = vec!["5".into(), "7".into()];
            c.samples = Some(1500);
            c.seed = Some(7);
        }),
        cli_config(Command::Census, |c| c.fields = vec!["5".into()]),
        cli_config(Command::VerifyLemma, |c| {
            c.fields = vec!["3".into(), "5".into()];
            c.k = vec![1, 2];
        }),
        cli_config(Command::Sharpness, |c| {
            c.variety = Some("quadric-cone-p4".into());
            c.fields = vec!["3".into()];
            c.k = vec![2];
        }),
    ];
    for flags in configs {
        let name = flags.command.unwrap().name();
        let mut outs = Vec::new();
        for workers in [1usize, 2, 4] {
            let mut f = flags.clone();
            f.workers = Some(workers);
            outs.push(run_cli(f)?);
        }
        for o in &outs[1..] {
            check(
                comparable(&o.json) == comparable(&outs[0].json),
                format!("{name}: JSON differs"),
            )?;
            check(o.csv == outs[0].csv, format!("{name}: CSV differs"))?;
        }
    }
    Ok("sample, census, verify-lemma, sharpness identical at 1, 2, 4 workers".into())
}

fn main() {
    let mut censuses = Vec::new();
    let c6 = sharpness_k1(&mut censuses);
    let c7 = sharpness_k2(&mut censuses);
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "exact slice-statistics identities", lemma_identities()),
        (2, "conic over F_2 gold values", conic_gold()),
        (3, "incidence constancy and enumeration totals", incidence()),
        (4, "Chebyshev bound on every census", chebyshev(&censuses)),
        (
            5,
            "component classifier known answers",
            component_known_answers(),
        ),
        (6, "P^3 cone very-bad counts and exponent", c6),
        (7, "P^4 cone k=2 census and exponent", c7),
        (8, "Monte Carlo consistency", monte_carlo()),
        (9, "determinism across reruns and workers", determinism()),
    ];
    let mut failed = 0;
    for (i, name, r) in &results {
        match r {
            Ok(detail) => println!("criterion {i} PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {i} FAIL  {name}: {why}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
