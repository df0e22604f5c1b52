use rand::seq::SliceRandom;
use rand::Rng;

use super::gen::{self, RuleKind};
use super::{par_random, par_tally, Tally};
use crate::bitset::BitSet;
use crate::directed_sets::FiniteOrder;
use crate::finite_topology::{FiniteSpace, PointSet};
use crate::pseudometric_core::{kuratowski_horizon_oracle, kuratowski_limits, rat, FinitePseudoMetric, RationalSet};
use crate::semiflow_cells::{attraction_trace_check, cell_image, omega_limit_cells, CellGrid, DiscreteSemiflow};
use crate::setvalued_maps::SetValuedMap;
use crate::subset_nets::{FiniteGround, FiniteNet, RationalNet, SetDescription, SubsetNet, Verdict};

fn show_finite(net: &FiniteNet) -> String {
    SubsetNet::Finite(net.clone()).to_json().to_string()
}

fn show_rational(net: &RationalNet) -> String {
    SubsetNet::Rational(net.clone()).to_json().to_string()
}

fn show_points(s: &RationalSet) -> String {
    SetDescription::Points(s.clone()).to_string()
}

fn topo(space: &FiniteSpace) -> FiniteGround {
    FiniteGround::topological(space.clone())
}

/// Directed nets: every directed preorder on up to four elements with every
/// assignment of subsets of a small space.
fn directed_units() -> Vec<(FiniteSpace, Vec<Vec<bool>>)> {
    let mut units = Vec::new();
    for rel in gen::directed_preorders(4) {
        let max_points = if rel.len() == 4 { 2 } else { 3 };
        for space in gen::all_spaces(max_points) {
            units.push((space, rel.clone()));
        }
    }
    units
}

fn directed_nets(space: &FiniteSpace, rel: &[Vec<bool>]) -> Vec<FiniteNet> {
    let subsets: Vec<PointSet> = BitSet::all_subsets(space.len()).collect();
    let order = FiniteOrder::new(rel.to_vec()).expect("directed preorder");
    gen::words(&subsets, rel.len())
        .into_iter()
        .map(|sets| FiniteNet::directed(topo(space), order.clone(), sets).expect("sizes match"))
        .collect()
}

/// Symbolic limit sets against the truncated defining intersection.
pub fn limit_set_oracle(_budget: u64, _seed: u64) -> Tally {
    let spaces = gen::all_spaces(3);
    let periodic = par_tally(&spaces, |space| {
        let mut t = Tally::default();
        for (pre, cyc) in gen::periodic_schedules(space.len(), 2, 2, false) {
            let net = FiniteNet::sequence(topo(space), pre, cyc).expect("valid schedule");
            t.instance();
            let oracle = net.limit_set_horizon_oracle(6, 16).expect("h2 >= h");
            t.check_eq(|| show_finite(&net), &oracle, &net.limit_set());
        }
        t
    });
    let directed = par_tally(&directed_units(), |(space, rel)| {
        let mut t = Tally::default();
        for net in directed_nets(space, rel) {
            t.instance();
            t.count("directed_nets", 1);
            let oracle = net.limit_set_horizon_oracle(0, 0).expect("finite index");
            t.check_eq(|| show_finite(&net), &oracle, &net.limit_set());
        }
        t
    });
    periodic.merge(directed)
}

/// `y ∈ L` iff a selection along a monotone final subsequence converges to `y`.
pub fn limit_set_characterization(_budget: u64, _seed: u64) -> Tally {
    let spaces = gen::all_spaces(3);
    let periodic = par_tally(&spaces, |space| {
        let mut t = Tally::default();
        for (pre, cyc) in gen::periodic_schedules(space.len(), 2, 2, false) {
            let net = FiniteNet::sequence(topo(space), pre, cyc).expect("valid schedule");
            t.instance();
            let l = net.limit_set();
            let search = net.sequential_limit_set_horizon(12).expect("horizon large enough");
            t.check_eq(|| format!("selection search on {}", show_finite(&net)), &l, &search);
            t.check_eq(|| format!("symbolic sequential set on {}", show_finite(&net)), &l, &net.sequential_limit_set());
        }
        t
    });
    let directed = par_tally(&directed_units(), |(space, rel)| {
        let mut t = Tally::default();
        for net in directed_nets(space, rel) {
            t.instance();
            let search = net.sequential_limit_set_horizon(0).expect("finite index");
            t.check_eq(|| show_finite(&net), &net.limit_set(), &search);
        }
        t
    });
    periodic.merge(directed)
}

/// `L = Limsup` on metric backends, plus agreement of the Kuratowski limits with their horizon oracle.
pub fn kuratowski_equality(budget: u64, seed: u64) -> Tally {
    let rational = par_random(seed, 1, budget, |_, rng| {
        let mut t = Tally::default();
        let kind = RuleKind::random(rng);
        let net = gen::random_rational_net(rng, kind, false);
        t.instance();
        let wrapped = SubsetNet::Rational(net.clone());
        let k = kuratowski_limits(&wrapped).expect("metric backend");
        let l = SetDescription::Points(net.limit_set());
        t.check_eq(|| format!("limit set vs limsup on {}", show_rational(&net)), &l, &k.limsup);
        t.check(
            k.liminf.is_subset(&k.limsup),
            || format!("liminf within limsup on {}", show_rational(&net)),
            || "liminf ⊆ limsup".into(),
            || format!("liminf {} limsup {}", k.liminf, k.limsup),
        );
        let oracle = kuratowski_horizon_oracle(&net, 128).expect("horizon large enough");
        t.check_eq(|| format!("limsup oracle on {}", show_rational(&net)), &oracle.limsup, &k.limsup);
        t.check_eq(|| format!("liminf oracle on {}", show_rational(&net)), &oracle.liminf, &k.liminf);
        let direct = SetDescription::Points(net.limit_set_horizon_oracle(8, 128).expect("h2 >= h"));
        t.check_eq(|| format!("truncated definition on {}", show_rational(&net)), &direct, &l);
        t
    });
    let finite = par_random(seed, 2, budget / 4, |_, rng| {
        let mut t = Tally::default();
        let n = rng.gen_range(1..=5);
        let metric = gen::random_metric(rng, n);
        let pre = (0..rng.gen_range(0..=2)).map(|_| gen::random_subset(rng, n, false)).collect();
        let cyc = (0..rng.gen_range(1..=3)).map(|_| gen::random_subset(rng, n, false)).collect();
        let net = FiniteNet::sequence(FiniteGround::metric_space(metric), pre, cyc).expect("valid schedule");
        t.instance();
        let k = kuratowski_limits(&SubsetNet::Finite(net.clone())).expect("metric ground");
        t.check_eq(|| show_finite(&net), &SetDescription::Indices(net.limit_set()), &k.limsup);
        t.check(k.liminf.is_subset(&k.limsup), || show_finite(&net), || "liminf ⊆ limsup".into(), || k.liminf.to_string());
        t
    });
    rational.merge(finite)
}

/// Hausdorff and regular containment lemmas, with an exhibit search on non-regular spaces.
pub fn separation_containments(_budget: u64, _seed: u64) -> Tally {
    let small = gen::all_spaces(3);
    let lemmas = par_tally(&small, |space| {
        let mut t = Tally::default();
        let hausdorff = space.is_hausdorff();
        let regular = space.is_regular();
        let targets: Vec<PointSet> = BitSet::all_subsets(space.len()).collect();
        for (pre, cyc) in gen::periodic_schedules(space.len(), 2, 2, false) {
            let net = FiniteNet::sequence(topo(space), pre, cyc).expect("valid schedule");
            let l = net.limit_set();
            for a in &targets {
                t.instance();
                if !net.converges_from_above(a).expect("same universe").holds() {
                    continue;
                }
                if hausdorff {
                    t.count("hausdorff_premises", 1);
                    t.check(
                        l.is_subset(a),
                        || format!("Hausdorff lemma, target {a}, net {}", show_finite(&net)),
                        || format!("L ⊆ {a}"),
                        || format!("L = {l}"),
                    );
                }
                let cls = space.closure(a);
                if regular {
                    t.count("regular_premises", 1);
                    t.check(
                        l.is_subset(&cls),
                        || format!("regular lemma, target {a}, net {}", show_finite(&net)),
                        || format!("L ⊆ cls(A) = {cls}"),
                        || format!("L = {l}"),
                    );
                } else if !l.is_subset(&cls) {
                    t.exhibit(
                        || format!("non-regular space {:?}, target {a}, net {}", space.spec(), show_finite(&net)),
                        || format!("L ⊆ cls(A) = {cls}"),
                        || format!("L = {l}"),
                    );
                }
            }
        }
        t
    });
    let four: Vec<FiniteSpace> = gen::all_spaces(4).into_iter().filter(|s| s.len() == 4 && !s.is_regular()).collect();
    let exhibits = par_tally(&four, |space| {
        let mut t = Tally::default();
        let targets: Vec<PointSet> = BitSet::all_subsets(4).collect();
        for (pre, cyc) in gen::periodic_schedules(4, 0, 2, false) {
            let net = FiniteNet::sequence(topo(space), pre, cyc).expect("valid schedule");
            let l = net.limit_set();
            for a in &targets {
                t.instance();
                let cls = space.closure(a);
                if net.converges_from_above(a).expect("same universe").holds() && !l.is_subset(&cls) {
                    t.exhibit(
                        || format!("non-regular space {:?}, target {a}, net {}", space.spec(), show_finite(&net)),
                        || format!("L ⊆ cls(A) = {cls}"),
                        || format!("L = {l}"),
                    );
                }
            }
        }
        t
    });
    lemmas.merge(exhibits)
}

/// Limit-set compactness on compact finite spaces, and the Lagrange-stability lemma on metric nets.
pub fn compactness_equivalences(budget: u64, seed: u64) -> Tally {
    let spaces = gen::all_spaces(3);
    let finite = par_tally(&spaces, |space| {
        let mut t = Tally::default();
        for (pre, cyc) in gen::periodic_schedules(space.len(), 2, 2, true) {
            let net = FiniteNet::sequence(topo(space), pre, cyc).expect("valid schedule");
            t.instance();
            let verdicts = [
                net.is_limit_set_compact(),
                net.is_eventually_lagrange_stable(),
                net.is_asymptotically_seq_compact(),
                net.is_weakly_asymptotically_seq_compact(),
            ];
            t.note_verdicts(&verdicts);
            t.check(
                verdicts.iter().all(Verdict::holds),
                || show_finite(&net),
                || "limit-set compact, Lagrange stable, both sequential compactness notions".into(),
                || format!("{verdicts:?}"),
            );
            let l = net.limit_set();
            t.check(
                !l.is_empty() && net.converges_from_above(&l).expect("same universe").holds(),
                || show_finite(&net),
                || "converges from above to a nonempty limit set".into(),
                || format!("L = {l}"),
            );
        }
        t
    });
    let metric = par_random(seed, 3, budget, |_, rng| {
        let mut t = Tally::default();
        let kind = RuleKind::random(rng);
        let net = gen::random_rational_net(rng, kind, true);
        t.instance();
        let lagrange = net.is_eventually_lagrange_stable();
        let weak = net.is_weakly_asymptotically_seq_compact();
        let lsc = net.is_limit_set_compact();
        let asc = net.is_asymptotically_seq_compact();
        t.note_verdicts(&[lagrange, weak, lsc, asc]);
        let l = net.limit_set();
        let above = net.converges_from_above(&l).expect("limit set lies in the space");
        if lagrange.holds() {
            t.count("lagrange_stable", 1);
            t.check(
                !l.is_empty() && above.holds() && asc.holds() && lsc.holds(),
                || show_rational(&net),
                || "nonempty compact attractor, asymptotically sequentially compact, limit-set compact".into(),
                || format!("L = {}, above {above}, asc {asc}, lsc {lsc}", show_points(&l)),
            );
        } else {
            t.count("lagrange_unstable", 1);
            t.check(
                lsc.fails(),
                || show_rational(&net),
                || "limit-set compactness fails with Lagrange stability".into(),
                || format!("{lsc}"),
            );
        }
        if weak.holds() {
            t.check(above.holds(), || show_rational(&net), || "from above to L".into(), || format!("{above}"));
        }
        t
    });
    finite.merge(metric)
}

/// The four compactness notions agree on pseudo-metric rule nets; every fifth instance is an excluded-limit trap.
pub fn pseudometrizable_equivalence(budget: u64, seed: u64) -> Tally {
    par_random(seed, 4, budget, |i, rng| {
        let mut t = Tally::default();
        let kind = if i % 5 == 0 { RuleKind::Trap } else { RuleKind::random(rng) };
        if kind == RuleKind::Trap {
            t.count("traps", 1);
        }
        let net = gen::random_rational_net(rng, kind, true);
        t.instance();
        let l = net.limit_set();
        let attracted = if l.is_empty() {
            Verdict::FAILS
        } else {
            net.semidistance_convergence_check(&l).expect("nonempty target")
        };
        let verdicts = [
            attracted,
            net.is_asymptotically_seq_compact(),
            net.is_weakly_asymptotically_seq_compact(),
            net.is_limit_set_compact(),
        ];
        t.note_verdicts(&verdicts);
        t.check(
            verdicts.iter().all(|v| v == &verdicts[0]),
            || show_rational(&net),
            || "all four verdicts equal".into(),
            || format!("{verdicts:?}"),
        );
        if !l.is_empty() {
            let above = net.converges_from_above(&l).expect("limit set lies in the space");
            t.check_eq(|| format!("topological vs distance route on {}", show_rational(&net)), &above, &attracted);
        }
        if kind == RuleKind::Trap {
            t.check(verdicts[0].fails(), || show_rational(&net), || "trap fails every notion".into(), || format!("{verdicts:?}"));
        }
        t
    })
}

/// `L = L_seq` on first-countable grounds, cluster points of attracted point nets, and the Hausdorff-or-regular equivalence.
pub fn sequential_limits(budget: u64, seed: u64) -> Tally {
    let rational = par_random(seed, 5, budget, |_, rng| {
        let mut t = Tally::default();
        let kind = RuleKind::random(rng);
        let net = gen::random_rational_net(rng, kind, false);
        t.instance();
        let l = net.limit_set();
        t.check_eq(|| show_rational(&net), &SetDescription::Points(l.clone()), &SetDescription::Points(net.sequential_limit_set()));
        let search = net.sequential_limit_set_horizon(128).expect("horizon large enough");
        t.check_eq(|| format!("selection search on {}", show_rational(&net)), &SetDescription::Points(l.clone()), &SetDescription::Points(search));
        let weak = net.is_weakly_asymptotically_seq_compact();
        t.note_verdicts(&[weak]);
        if weak.holds() {
            let above = net.converges_from_above(&l).expect("limit set lies in the space");
            t.check(above.holds(), || show_rational(&net), || "from above to L".into(), || format!("{above}"));
        }
        if net.is_singleton_valued() && !l.is_empty() && net.converges_from_above(&l).expect("in space").holds() {
            let c = net.cluster_set().expect("point net");
            t.check(!c.is_empty(), || show_rational(&net), || "nonempty cluster set".into(), || show_points(&c));
        }
        t
    });
    let spaces = gen::all_spaces(3);
    let finite = par_tally(&spaces, |space| {
        let mut t = Tally::default();
        let targets: Vec<PointSet> = BitSet::all_subsets(space.len()).filter(|s| !s.is_empty()).collect();
        let singletons: Vec<PointSet> = (0..space.len()).map(|i| BitSet::singleton(space.len(), i)).collect();
        for pre_len in 0..=2 {
            for cyc_len in 1..=3 {
                for word in gen::words(&singletons, pre_len + cyc_len) {
                    let (pre, cyc) = word.split_at(pre_len);
                    let net = FiniteNet::sequence(topo(space), pre.to_vec(), cyc.to_vec()).expect("valid schedule");
                    t.instance();
                    let cluster = net.cluster_set().expect("point net");
                    t.check_eq(|| format!("cluster set vs limit set on {}", show_finite(&net)), &net.limit_set(), &cluster);
                    for k in &targets {
                        if net.converges_from_above(k).expect("same universe").holds() {
                            t.check(!cluster.is_empty(), || show_finite(&net), || "nonempty cluster set".into(), || cluster.to_string());
                        }
                    }
                }
            }
        }
        if space.is_hausdorff() || space.is_regular() {
            for (pre, cyc) in gen::periodic_schedules(space.len(), 2, 2, true) {
                let net = FiniteNet::sequence(topo(space), pre, cyc).expect("valid schedule");
                t.instance();
                let attracted = targets.iter().any(|k| net.converges_from_above(k).expect("same universe").holds());
                let lsc = net.is_limit_set_compact();
                t.check_eq(|| format!("Hausdorff-or-regular equivalence on {}", show_finite(&net)), &Verdict::from_bool(attracted), &lsc);
            }
        }
        t
    });
    rational.merge(finite)
}

/// Distance criteria for convergence from above and below, and the inner-radius lemma.
pub fn semidistance_criteria(budget: u64, seed: u64) -> Tally {
    let rational = par_random(seed, 6, budget, |_, rng| {
        let mut t = Tally::default();
        let kind = RuleKind::random(rng);
        let net = gen::random_rational_net(rng, kind, false);
        let k = gen::random_target(rng, &net, true);
        t.instance();
        let above = net.converges_from_above(&k).expect("target in space");
        let dist = net.semidistance_convergence_check(&k).expect("nonempty target");
        let (below, dist_below) = net.below_iff_semidistance(&k).expect("nonempty target");
        t.note_verdicts(&[above, dist, below, dist_below]);
        t.check_eq(|| format!("above, K = {}, net {}", show_points(&k), show_rational(&net)), &above, &dist);
        t.check_eq(|| format!("below, K = {}, net {}", show_points(&k), show_rational(&net)), &below, &dist_below);
        t
    });
    let finite = par_random(seed, 7, budget, |_, rng| {
        let mut t = Tally::default();
        let n = rng.gen_range(1..=5);
        let metric = gen::random_metric(rng, n);
        let pre = (0..rng.gen_range(0..=2)).map(|_| gen::random_subset(rng, n, false)).collect();
        let cyc = (0..rng.gen_range(1..=3)).map(|_| gen::random_subset(rng, n, false)).collect();
        let net = FiniteNet::sequence(FiniteGround::metric_space(metric), pre, cyc).expect("valid schedule");
        let k = gen::random_subset(rng, n, true);
        t.instance();
        let above = net.converges_from_above(&k).expect("same universe");
        let dist = net.semidistance_convergence_check(&k).expect("metric ground");
        let (below, dist_below) = net.below_iff_semidistance(&k).expect("metric ground");
        t.check_eq(|| format!("above, K = {k}, net {}", show_finite(&net)), &above, &dist);
        t.check_eq(|| format!("below, K = {k}, net {}", show_finite(&net)), &below, &dist_below);
        t
    });
    let radius = par_random(seed, 8, budget, |_, rng| {
        let mut t = Tally::default();
        let n = rng.gen_range(1..=6);
        let m = gen::random_metric(rng, n);
        let k = gen::random_subset(rng, n, true);
        let u = m.topology().minimal_open_superset(&k.union(&gen::random_subset(rng, n, false)));
        t.instance();
        match m.compact_inner_radius(&k, &u) {
            Ok(delta) => {
                let ball = m.ball(&k, &delta);
                t.check(
                    delta > rat(0, 1) && ball.is_subset(&u),
                    || format!("metric {:?}, K = {k}, U = {u}", metric_rows(&m)),
                    || "B(K; δ) ⊆ U with δ > 0".into(),
                    || format!("δ = {delta}, ball {ball}"),
                );
            }
            Err(e) => t.check(false, || format!("metric {:?}, K = {k}, U = {u}", metric_rows(&m)), || "a radius".into(), || e.to_string()),
        }
        t
    });
    rational.merge(finite).merge(radius)
}

fn metric_rows(m: &FinitePseudoMetric) -> Vec<Vec<String>> {
    m.matrix().iter().map(|r| r.iter().map(|q| q.to_string()).collect()).collect()
}

/// Regularity by definition: every point can be separated from every closed set missing it.
fn regular_by_definition(space: &FiniteSpace) -> bool {
    let opens = space.open_sets();
    space.closed_sets().iter().all(|c| {
        (0..space.len()).filter(|&x| !c.contains(x)).all(|x| {
            opens.iter().any(|u| c.is_subset(u) && opens.iter().any(|v| v.contains(x) && u.is_disjoint(v)))
        })
    })
}

fn usc_by_definition(f: &SetValuedMap, x: usize, dom_open: &[PointSet], cod_open: &[PointSet]) -> bool {
    cod_open.iter().filter(|u| f.value(x).is_subset(u)).all(|u| {
        dom_open
            .iter()
            .any(|v| v.contains(x) && f.image(v).expect("domain set").is_subset(u))
    })
}

fn lsc_by_definition(f: &SetValuedMap, x: usize, dom_open: &[PointSet], cod_open: &[PointSet]) -> bool {
    f.value(x).iter().all(|y| {
        cod_open.iter().filter(|u| u.contains(y)).all(|u| {
            dom_open
                .iter()
                .any(|v| v.contains(x) && v.iter().all(|xp| f.value(xp).intersects(u)))
        })
    })
}

/// Semicontinuity against definitions, the semi-distance criterion, approach nets, and regularity.
pub fn semicontinuity(_budget: u64, _seed: u64) -> Tally {
    let spaces = gen::all_spaces(4);
    let regular = par_tally(&spaces, |space| {
        let mut t = Tally::default();
        t.instance();
        let sym = space.is_pseudometrizable();
        let def = regular_by_definition(space);
        let spec = || format!("{:?}", space.spec());
        t.check_eq(|| format!("is_regular vs symmetric preorder on {}", spec()), &sym, &space.is_regular());
        t.check_eq(|| format!("is_regular vs definition on {}", spec()), &def, &space.is_regular());
        t
    });

    // Topological maps between small spaces, against the neighborhood definitions.
    let pairs: Vec<(FiniteSpace, FiniteSpace)> = gen::all_spaces(3)
        .into_iter()
        .flat_map(|d| gen::all_spaces(2).into_iter().map(move |c| (d.clone(), c)))
        .collect();
    let topological = par_tally(&pairs, |(dom, cod)| {
        let mut t = Tally::default();
        let dom_open = dom.open_sets();
        let cod_open = cod.open_sets();
        let values: Vec<PointSet> = BitSet::all_subsets(cod.len()).collect();
        for graph in gen::words(&values, dom.len()) {
            let f = SetValuedMap::new(topo(dom), topo(cod), graph).expect("valid graph");
            for x in 0..dom.len() {
                t.instance();
                let show = || format!("x = {x}, map {}", f.to_json());
                t.check_eq(|| format!("usc {}", show()), &usc_by_definition(&f, x, &dom_open, &cod_open), &f.is_usc_at(x).expect("point"));
                t.check_eq(|| format!("lsc {}", show()), &lsc_by_definition(&f, x, &dom_open, &cod_open), &f.is_lsc_at(x).expect("point"));
                if dom.is_hausdorff() {
                    t.check(
                        f.is_usc_at(x).expect("point") && f.is_lsc_at(x).expect("point"),
                        || format!("discrete domain {}", show()),
                        || "usc and lsc".into(),
                        || "not both".into(),
                    );
                }
            }
        }
        t
    });

    // Pseudo-metric instances: values in {0, 1, 2}, one metric per relabeling class, every graph.
    let doms: Vec<FinitePseudoMetric> = (1..=4).flat_map(|n| gen::small_metrics_up_to_relabeling(n, 2)).collect();
    let cods: Vec<FinitePseudoMetric> = (1..=3).flat_map(|n| gen::small_metrics_up_to_relabeling(n, 2)).collect();
    let metric_pairs: Vec<(FinitePseudoMetric, FinitePseudoMetric)> = doms
        .iter()
        .flat_map(|d| cods.iter().map(move |c| (d.clone(), c.clone())))
        .collect();
    let metric = par_tally(&metric_pairs, |(dm, cm)| {
        let mut t = Tally::default();
        let dom = FiniteGround::metric_space(dm.clone());
        let cod = FiniteGround::metric_space(cm.clone());
        let values: Vec<PointSet> = BitSet::all_subsets(cm.len()).collect();
        for graph in gen::words(&values, dm.len()) {
            let f = SetValuedMap::new(dom.clone(), cod.clone(), graph).expect("valid graph");
            for x in 0..dm.len() {
                if f.value(x).is_empty() {
                    continue;
                }
                t.instance();
                let lsc = f.is_lsc_at(x).expect("point");
                let via = f.lsc_via_semidistance(x).expect("metric instance");
                let show = || format!("x = {x}, map {}", f.to_json());
                t.check_eq(|| format!("semi-distance criterion {}", show()), &lsc, &via);
                let approach = f
                    .approach_image_net(x)
                    .expect("metric domain")
                    .converges_from_below(f.value(x))
                    .expect("codomain set");
                t.check_eq(|| format!("approach net {}", show()), &Verdict::from_bool(lsc), &approach);
            }
        }
        t
    });
    regular.merge(topological).merge(metric)
}

/// Cell-level omega sets: forward invariance, attraction traces, and agreement with net limit sets.
pub fn omega_consistency(budget: u64, seed: u64) -> Tally {
    let line = CellGrid::new(1, 64).expect("valid grid");
    let square = CellGrid::new(2, 64).expect("valid grid");
    let mut flows: Vec<(CellGrid, DiscreteSemiflow)> = Vec::new();
    for r in [1.0, 2.0, 3.0, 3.5, 4.0] {
        flows.push((line, DiscreteSemiflow::logistic(r).expect("in range")));
    }
    for mu in [0.5, 1.0, 1.5, 2.0] {
        flows.push((line, DiscreteSemiflow::tent(mu).expect("in range")));
    }
    for theta in [rat(1, 8), rat(1, 3), rat(3, 64)] {
        flows.push((line, DiscreteSemiflow::rotation(theta)));
    }
    flows.push((square, DiscreteSemiflow::henon(1.4, 0.3).expect("finite")));
    let per_flow = budget.clamp(1, 20);
    let units: Vec<(usize, u64)> = (0..flows.len()).flat_map(|f| (0..per_flow).map(move |i| (f, i))).collect();
    par_tally(&units, |&(fi, i)| {
        let mut t = Tally::default();
        let (grid, flow) = &flows[fi];
        let mut rng = super::instance_rng(seed, 9, fi as u64 * 1000 + i);
        let mut cells: Vec<usize> = (0..grid.cell_count()).collect();
        cells.shuffle(&mut rng);
        let take = rng.gen_range(1..=4);
        let e = grid.cells(cells[..take].iter().copied()).expect("in range");
        t.instance();
        let show = || format!("{flow} on {} cells from {e}", grid.cell_count());
        let r = match omega_limit_cells(grid, flow, &e) {
            Ok(r) => r,
            Err(err) => {
                t.check(false, show, || "an omega set".into(), || err.to_string());
                return t;
            }
        };
        let image = cell_image(grid, flow, &r.omega).expect("valid cells");
        t.check_eq(|| format!("forward invariance, {}", show()), &r.omega, &image);
        t.check(attraction_trace_check(&r), show, || "zero trace past the preperiod".into(), || format!("{:?}", r.trace));
        let at_entry = r.trace[r.preperiod].distance_cells;
        t.check(at_entry.is_some_and(|d| d.is_zero()), show, || "zero trace at the preperiod".into(), || format!("{at_entry:?}"));
        if grid.dim() == 1 {
            let all: Vec<usize> = (0..grid.cell_count()).collect();
            let net = r.center_net(&all).expect("every cell listed");
            t.check_eq(|| format!("center net limit set, {}", show()), &r.omega, &net.limit_set());
        }
        t
    })
}
