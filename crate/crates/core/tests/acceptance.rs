//! Acceptance suite: one test per criterion, each printing a PASS line.
//! All arithmetic is exact rational, so every comparison is bit-exact.

use std::collections::BTreeMap;

use ffc_core::annuli::{transition_law_holds, FramedAnnulus};
use ffc_core::artin::{ArtinSpec, RingElem};
use ffc_core::corolla::{
    check_operadic_axioms, composable_corpus, composition_audit, contraction_order_independent,
    morphism_from_graph, mutation_detection_rate, Bounds, CommMonoidAlgebra, MonoidTable,
    TerminalAlgebra,
};
use ffc_core::curves::random_curve;
use ffc_core::dsl::{parse, Env};
use ffc_core::graphs::{collapse, End, Graph, ModularGraph};
use ffc_core::suites::{
    random_annulus, random_nilpotent, random_normal_form, random_unit, random_witt_aut,
    rng_from_seed,
};
use ffc_core::witt::{birkhoff_factor, normal_product, NormalForm};
use rand::Rng;

fn passed(criterion: usize, name: &str, detail: String) {
    println!("ACCEPTANCE {:>2} {:<28} PASS ({})", criterion, name, detail);
}

#[test]
fn criterion_1_factorization_round_trip() {
    let mut total = 0;
    for spec in [ArtinSpec::new(1, 3), ArtinSpec::new(2, 3)] {
        let mut rng = rng_from_seed(101);
        for _ in 0..1000 {
            let f = random_witt_aut(&mut rng, spec);
            let nf = birkhoff_factor(&f);
            assert_eq!(nf.as_automorphism().unwrap(), f, "round trip over {}", spec);
            // uniqueness: assembled triples are recovered on the nose
            let t = random_normal_form(&mut rng, spec, true);
            let assembled = t.as_automorphism().unwrap();
            assert_eq!(birkhoff_factor(&assembled), t, "uniqueness over {}", spec);
            total += 2;
        }
    }
    passed(
        1,
        "factorization round trip",
        format!("{} exact identities", total),
    );
}

#[test]
fn criterion_2_monoid_laws() {
    let spec = ArtinSpec::new(2, 3);
    let mut rng = rng_from_seed(202);
    let mut zero_mids = 0;
    let mut nilpotent_mids = 0;
    for _ in 0..1000 {
        let a = random_normal_form(&mut rng, spec, false);
        let b = random_normal_form(&mut rng, spec, false);
        let c = random_normal_form(&mut rng, spec, false);
        for x in [&a, &b, &c] {
            if x.mid.is_zero() {
                zero_mids += 1;
            } else if x.mid.is_nilpotent() {
                nilpotent_mids += 1;
            }
        }
        let ab_c = normal_product(&normal_product(&a, &b).unwrap(), &c).unwrap();
        let a_bc = normal_product(&a, &normal_product(&b, &c).unwrap()).unwrap();
        assert_eq!(ab_c, a_bc, "associativity");
        let id = NormalForm::identity(spec);
        assert_eq!(normal_product(&id, &a).unwrap(), a, "left unit");
        assert_eq!(normal_product(&a, &id).unwrap(), a, "right unit");
        // group compatibility on unit mids
        let ua = random_normal_form(&mut rng, spec, true);
        let ub = random_normal_form(&mut rng, spec, true);
        let via_monoid = normal_product(&ua, &ub).unwrap();
        let via_group = birkhoff_factor(
            &ua.as_automorphism()
                .unwrap()
                .compose(&ub.as_automorphism().unwrap())
                .unwrap(),
        );
        assert_eq!(via_monoid, via_group, "agreement with the group law");
        // the reduced affine coordinate is a monoid homomorphism
        let prod = normal_product(&a, &b).unwrap();
        assert_eq!(
            prod.reduce(),
            a.reduce().mul(&b.reduce()),
            "reduced coordinate"
        );
    }
    assert!(
        zero_mids > 0 && nilpotent_mids > 0,
        "mid sampling covers the boundary"
    );
    passed(
        2,
        "monoid laws",
        format!(
            "1000 triples, {} zero and {} nilpotent mids seen",
            zero_mids, nilpotent_mids
        ),
    );
}

#[test]
fn criterion_3_transition_oracle() {
    let spec = ArtinSpec::new(2, 3);
    let mut rng = rng_from_seed(303);
    for _ in 0..500 {
        let a = random_annulus(&mut rng, spec);
        let b = random_annulus(&mut rng, spec);
        assert!(transition_law_holds(&a, &b), "transition law");
    }
    // specialization consistency: substituting nilpotent values for the
    // generic parameters commutes with gluing
    let ext = spec.extended(2);
    let mut rng = rng_from_seed(304);
    for _ in 0..120 {
        let a = random_annulus(&mut rng, spec);
        let b = random_annulus(&mut rng, spec);
        let generic = a
            .lift_generic(ext, 0)
            .glue(&b.lift_generic(ext, 1))
            .unwrap();
        let va = random_nilpotent(&mut rng, spec);
        let vb = random_nilpotent(&mut rng, spec);
        let specialize = |nf: &NormalForm| -> NormalForm {
            let m = |x: &RingElem| {
                x.specialize_generics(spec, &[va.clone(), vb.clone()])
                    .unwrap()
            };
            let neg = ffc_core::witt::NegAut::from_coeffs(
                spec,
                (1..=nf.neg.coeffs().map(|(n, _)| *n).max().unwrap_or(0))
                    .map(|n| m(&nf.neg.coeff(n)))
                    .collect(),
            )
            .unwrap();
            let pos = ffc_core::witt::PosAut::from_coeffs(
                spec,
                (1..=nf.pos.coeffs().map(|(n, _)| *n).max().unwrap_or(0))
                    .map(|n| m(&nf.pos.coeff(n)))
                    .collect(),
            )
            .unwrap();
            NormalForm::new(neg, m(&nf.mid), pos)
        };
        let specialized = specialize(&generic.to_monoid_chart());
        let direct = {
            let aa = FramedAnnulus::new(a.alpha_in().clone(), va.clone(), a.alpha_out().clone())
                .unwrap();
            let bb = FramedAnnulus::new(b.alpha_in().clone(), vb.clone(), b.alpha_out().clone())
                .unwrap();
            aa.glue(&bb).unwrap().to_monoid_chart()
        };
        assert_eq!(specialized, direct, "specialization consistency");
    }
    passed(
        3,
        "transition oracle",
        "500 composition laws, 120 specializations".into(),
    );
}

/// Independent cycle-rank oracle: count back-edges of a depth-first
/// spanning forest of the interior.
fn cycle_rank_oracle(g: &Graph) -> u32 {
    let interior = g.interior();
    let verts: Vec<usize> = interior.vertices.iter().cloned().collect();
    let index: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); verts.len()]; // edge endpoints
    for e in &interior.edges {
        let a = index[&e.src.vertex().unwrap()];
        let b = index[&e.dst.vertex().unwrap()];
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; verts.len()];
    let mut tree_edges = 0usize;
    for start in 0..verts.len() {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    tree_edges += 1;
                    stack.push(w);
                }
            }
        }
    }
    (interior.edges.len() - tree_edges) as u32 + g.circles as u32
}

/// All modular graphs with the given limits, vertices 0..k, per-vertex
/// genus bounded.
fn enumerate_modular_graphs(
    max_vertices: usize,
    max_edges: usize,
    max_genus: u32,
) -> Vec<ModularGraph> {
    let mut out = Vec::new();
    for nv in 0..=max_vertices {
        let mut ends: Vec<End> = (0..nv).map(End::Vertex).collect();
        ends.push(End::Star);
        let mut edge_types: Vec<(End, End)> = Vec::new();
        for &a in &ends {
            for &b in &ends {
                edge_types.push((a, b));
            }
        }
        // multisets of up to max_edges edge types
        fn multisets(
            types: &[(End, End)],
            from: usize,
            left: usize,
            acc: &mut Vec<(End, End)>,
            f: &mut impl FnMut(&[(End, End)]),
        ) {
            f(acc);
            if left == 0 {
                return;
            }
            for i in from..types.len() {
                acc.push(types[i]);
                multisets(types, i, left - 1, acc, f);
                acc.pop();
            }
        }
        let mut genus_choices: Vec<Vec<u32>> = vec![vec![]];
        for _ in 0..nv {
            let mut next = Vec::new();
            for g in &genus_choices {
                for x in 0..=max_genus {
                    let mut g2 = g.clone();
                    g2.push(x);
                    next.push(g2);
                }
            }
            genus_choices = next;
        }
        let mut acc = Vec::new();
        multisets(&edge_types, 0, max_edges, &mut acc, &mut |edges| {
            for genus in &genus_choices {
                let g = Graph::new(
                    0..nv,
                    edges
                        .iter()
                        .enumerate()
                        .map(|(i, (a, b))| (i, *a, *b))
                        .collect(),
                );
                let genus_map: BTreeMap<usize, u32> =
                    genus.iter().enumerate().map(|(v, g)| (v, *g)).collect();
                out.push(ModularGraph::new(g, genus_map).unwrap());
            }
        });
    }
    out
}

#[test]
fn criterion_4_corolla_operad_suite() {
    // collapse genus agrees with the spanning-forest cycle-rank oracle on
    // every modular graph with <= 4 edges, <= 3 vertices, genus <= 2
    let graphs = enumerate_modular_graphs(3, 4, 2);
    let mut checked = 0usize;
    for mg in &graphs {
        let c = collapse(mg);
        let total: u32 = c.multicorolla.corollas.iter().map(|c| c.genus).sum();
        let vertex_sum: u32 = mg.genus.values().sum();
        assert_eq!(
            total,
            vertex_sum + cycle_rank_oracle(&mg.graph),
            "genus conservation on {:?}",
            mg
        );
        checked += 1;
    }
    // exhaustive category laws and the operadic axioms, both variants
    for directed in [true, false] {
        let bounds = Bounds {
            max_vertices: 2,
            max_degree: 2,
            max_genus: 1,
            directed,
        };
        let (assoc, unit, pi, stable, forget) = composition_audit(&bounds, 2);
        assert!(assoc, "associativity (directed={})", directed);
        assert!(unit, "unitality (directed={})", directed);
        assert!(pi, "projection functoriality (directed={})", directed);
        assert!(stable, "stability closure (directed={})", directed);
        assert!(!directed || forget, "orientation forgetting");
        let axioms = check_operadic_axioms(&bounds);
        assert!(axioms.ok(), "axioms: {:?}", axioms.counterexamples);
    }
    // the mutation harness detects at least 95% of injected corruptions
    let corpus = composable_corpus(
        &Bounds {
            max_vertices: 2,
            max_degree: 2,
            max_genus: 1,
            directed: true,
        },
        40,
    );
    let (detected, injected) = mutation_detection_rate(&corpus);
    assert!(injected >= 20, "harness injected too little: {}", injected);
    assert!(
        detected * 100 >= injected * 95,
        "detection rate {}/{} below 95%",
        detected,
        injected
    );
    passed(
        4,
        "corolla operad suite",
        format!(
            "{} graphs, axioms both variants, mutations {}/{}",
            checked, detected, injected
        ),
    );
}

#[test]
fn criterion_5_contraction_order_independence() {
    // all modular graphs with <= 4 edges on <= 2 vertices, evaluated in
    // the terminal algebra over every contraction order
    let graphs = enumerate_modular_graphs(2, 4, 1);
    let mut terminal_checked = 0usize;
    for mg in &graphs {
        let Ok(m) = morphism_from_graph(mg, true) else {
            continue;
        };
        let inputs = vec![BTreeMap::new(); m.source.len()];
        assert!(
            contraction_order_independent(&m, &TerminalAlgebra, &inputs).unwrap(),
            "terminal order independence on {:?}",
            mg
        );
        terminal_checked += 1;
    }
    assert!(terminal_checked > 100);

    // annuli-decorated genus-zero algebra: the finite scaling submonoid
    // {1, -1, 0, eps, -eps} with multiplication computed by the real
    // normal-product machinery
    let spec = ArtinSpec::new(1, 1);
    let eps = RingElem::var(spec, 0);
    let elems = vec![
        NormalForm::identity(spec),
        NormalForm::scaling(RingElem::from_int(spec, -1)),
        NormalForm::scaling(RingElem::zero(spec)),
        NormalForm::scaling(eps.clone()),
        NormalForm::scaling(eps.neg()),
    ];
    let table: Vec<Vec<usize>> = elems
        .iter()
        .map(|a| {
            elems
                .iter()
                .map(|b| {
                    let p = normal_product(a, b).unwrap();
                    elems
                        .iter()
                        .position(|x| *x == p)
                        .expect("closed submonoid")
                })
                .collect()
        })
        .collect();
    let monoid = MonoidTable {
        names: vec![
            "1".into(),
            "-1".into(),
            "0".into(),
            "eps".into(),
            "-eps".into(),
        ],
        unit: 0,
        table,
    };
    assert!(
        monoid.is_monoid(),
        "the scaling submonoid table is a monoid"
    );
    let alg = CommMonoidAlgebra { monoid };
    let mut rng = rng_from_seed(505);
    let mut bush_checked = 0usize;
    for mg in &graphs {
        let Ok(m) = morphism_from_graph(mg, true) else {
            continue;
        };
        let bushy = m
            .source
            .corollas
            .iter()
            .chain(m.target.corollas.iter())
            .all(|c| c.genus == 0 && c.outputs() == 1);
        if !bushy {
            continue;
        }
        // decorate every input slot with a random monoid element
        let inputs: Vec<BTreeMap<_, usize>> = m
            .source
            .corollas
            .iter()
            .enumerate()
            .map(|(v, c)| {
                c.dirs
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| **d == ffc_core::graphs::Dir::In)
                    .map(|(l, _)| {
                        (
                            ffc_core::corolla::Tag::Src {
                                vertex: v,
                                label: l,
                            },
                            rng.gen_range(0..5usize),
                        )
                    })
                    .collect()
            })
            .collect();
        assert!(
            contraction_order_independent(&m, &alg, &inputs).unwrap(),
            "bush order independence on {:?}",
            mg
        );
        bush_checked += 1;
    }
    assert!(bush_checked > 20);
    passed(
        5,
        "contraction order freedom",
        format!(
            "{} terminal + {} decorated graphs",
            terminal_checked, bush_checked
        ),
    );
}

#[test]
fn criterion_6_fld_operad_suite() {
    let spec = ArtinSpec::new(2, 3);
    let mut rng = rng_from_seed(606);
    let mut instances = 0usize;
    while instances < 500 {
        let x = random_curve(&mut rng, spec, 2).unwrap();
        let y = random_curve(&mut rng, spec, 2).unwrap();
        let z = random_curve(&mut rng, spec, 1).unwrap();
        instances += 3;
        // nested associativity
        let i = rng.gen_range(0..2usize);
        let lhs = x.stable_glue(i, &y).unwrap().stable_glue(i, &z).unwrap();
        let rhs = x.stable_glue(i, &y.stable_glue(0, &z).unwrap()).unwrap();
        assert_eq!(lhs, rhs, "nested associativity");
        // parallel order swap
        let l = x.stable_glue(0, &y).unwrap();
        let l = l.stable_glue(y.incoming_count(), &z).unwrap();
        let r = x.stable_glue(1, &z).unwrap();
        let r = r.stable_glue(0, &y).unwrap();
        assert_eq!(l, r, "parallel associativity");
        // equivariance
        let perm = vec![1, 0];
        let relabeled = x.relabel_slots(&perm).unwrap();
        for k in 0..2 {
            assert_eq!(
                relabeled.angle(k).unwrap(),
                x.angle(perm[k]).unwrap(),
                "equivariance"
            );
        }
        // angle multiplicativity
        let glued = x.stable_glue(i, &y).unwrap();
        for k in 0..y.incoming_count() {
            let lhs = glued.angle(i + k).unwrap().0;
            let rhs = normal_product(&y.angle(k).unwrap().0, &x.angle(i).unwrap().0).unwrap();
            assert_eq!(lhs, rhs, "angle multiplicativity");
        }
        // unit annulus action
        assert_eq!(
            x.annulus_act(&NormalForm::identity(spec), 0).unwrap(),
            x,
            "unit action"
        );
        // reduced locus: gluing and reduction commute, and the fresh node
        // parameter is exactly zero
        let reduced = glued.reduce();
        let expected = x.reduce().stable_glue(i, &y.reduce()).unwrap();
        assert_eq!(reduced, expected, "reduced nodal union");
        assert!(
            glued.edges.iter().any(|e| e.node.mid.is_zero()),
            "fresh node at q = 0"
        );
    }
    // cross-module agreement: annuli acting through their monoid charts
    // compose exactly as the gluing semigroup
    let mut rng = rng_from_seed(607);
    for _ in 0..100 {
        let x = random_curve(&mut rng, spec, 1).unwrap();
        let a = random_annulus(&mut rng, spec);
        let b = random_annulus(&mut rng, spec);
        let lhs = x
            .annulus_act(&a.glue(&b).unwrap().to_monoid_chart(), 0)
            .unwrap();
        let rhs = x
            .annulus_act(&b.to_monoid_chart(), 0)
            .unwrap()
            .annulus_act(&a.to_monoid_chart(), 0)
            .unwrap();
        assert_eq!(lhs, rhs, "stable gluing matches the annuli semigroup");
    }
    passed(
        6,
        "genus-0 operad suite",
        format!("{} curve instances + 100 cross-module", instances),
    );
}

#[test]
fn criterion_7_comm_g_sanity() {
    // the trivial monoid gives the terminal operad: exactly one operation
    // per arity, and every bush evaluation collapses to it
    let trivial = MonoidTable::trivial();
    assert!(trivial.is_monoid());
    for arity in 0..6u32 {
        let count = trivial.size().pow(arity);
        assert_eq!(count, 1, "one operation in arity {}", arity);
    }
    let alg = CommMonoidAlgebra {
        monoid: MonoidTable::trivial(),
    };
    let graphs = enumerate_modular_graphs(2, 3, 0);
    let mut evaluated = 0usize;
    for mg in &graphs {
        let Ok(m) = morphism_from_graph(mg, true) else {
            continue;
        };
        let bushy = m
            .source
            .corollas
            .iter()
            .chain(m.target.corollas.iter())
            .all(|c| c.genus == 0 && c.outputs() == 1);
        if !bushy {
            continue;
        }
        let inputs: Vec<BTreeMap<_, usize>> = m
            .source
            .corollas
            .iter()
            .enumerate()
            .map(|(v, c)| {
                c.dirs
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| **d == ffc_core::graphs::Dir::In)
                    .map(|(l, _)| {
                        (
                            ffc_core::corolla::Tag::Src {
                                vertex: v,
                                label: l,
                            },
                            0usize,
                        )
                    })
                    .collect()
            })
            .collect();
        let edges = ffc_core::corolla::contractible_edges(&m);
        let out = ffc_core::corolla::evaluate_contraction(&m, &alg, &edges, &inputs).unwrap();
        for elem in out {
            for (_, v) in elem {
                assert_eq!(v, 0, "the unique element");
            }
        }
        evaluated += 1;
    }
    assert!(evaluated > 10);

    // the angle tuple is an operad map on random composites
    let spec = ArtinSpec::new(2, 2);
    let mut rng = rng_from_seed(707);
    for _ in 0..200 {
        let x = random_curve(&mut rng, spec, 2).unwrap();
        let y = random_curve(&mut rng, spec, 2).unwrap();
        let i = rng.gen_range(0..2usize);
        let z = x.stable_glue(i, &y).unwrap();
        let zs = z.comm_g_map().unwrap();
        let xs = x.comm_g_map().unwrap();
        let ys = y.comm_g_map().unwrap();
        let mut expected = Vec::new();
        for (k, a) in xs.iter().enumerate() {
            if k == i {
                for b in &ys {
                    expected.push(ffc_core::curves::AngleValue(
                        normal_product(&b.0, &xs[i].0).unwrap(),
                    ));
                }
            } else {
                expected.push(a.clone());
            }
        }
        assert_eq!(zs, expected, "operad map law");
    }
    passed(
        7,
        "Comm_G sanity",
        format!("{} terminal evaluations, 200 composites", evaluated),
    );
}

#[test]
fn criterion_8_cli_golden_and_determinism() {
    // the golden corpus lives beside this test; each case is a program
    // with a pinned ring spec and expected output
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut cases = 0usize;
    let mut entries: Vec<_> = std::fs::read_dir(&dir)
        .expect("golden directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().map_or(false, |x| x == "sexp"))
        .collect();
    entries.sort();
    assert!(
        entries.len() >= 20,
        "need at least 20 golden programs, found {}",
        entries.len()
    );
    for path in entries {
        let src = std::fs::read_to_string(&path).unwrap();
        let mut lines = src.lines();
        let header = lines.next().expect("ring header line");
        let ring = header.trim_start_matches(';').trim();
        let (m, rest) = parse_ring_header(ring);
        let program: String = lines.collect::<Vec<_>>().join("\n");
        let spec = ArtinSpec::with_generics(m, rest.0, rest.1);
        let env = Env::new(spec);
        let out = match env.run(&program) {
            Ok(v) => serde_json::to_string(&v).unwrap(),
            Err(e) => format!("error: {}", e),
        };
        let expected_path = path.with_extension("expected");
        let expected = std::fs::read_to_string(&expected_path)
            .unwrap_or_else(|_| panic!("missing expected file for {:?}", path));
        assert_eq!(
            out.trim(),
            expected.trim(),
            "golden mismatch for {:?}",
            path
        );
        // determinism: byte-identical on a second run
        let again = match env.run(&program) {
            Ok(v) => serde_json::to_string(&v).unwrap(),
            Err(e) => format!("error: {}", e),
        };
        assert_eq!(out, again, "nondeterministic output for {:?}", path);
        // parse/serialize round trip on the program text
        if let Ok(e) = parse(&program) {
            let back = parse(&e.to_sexp()).unwrap();
            assert!(e.same(&back), "sexp round trip for {:?}", path);
        }
        // the compiled binary must agree byte for byte on success cases
        let bin = std::process::Command::new(env!("CARGO_BIN_EXE_ffc"))
            .args(["--ring", ring])
            .arg(&path)
            .output()
            .expect("run the ffc binary");
        if expected.starts_with("error:") {
            assert!(!bin.status.success(), "binary should fail for {:?}", path);
        } else {
            assert!(bin.status.success(), "binary failed for {:?}", path);
            assert_eq!(
                String::from_utf8_lossy(&bin.stdout).trim(),
                expected.trim(),
                "binary output mismatch for {:?}",
                path
            );
        }
        cases += 1;
    }
    // exit codes through the real binary: domain errors are 1, parse and
    // type errors are 2
    let run = |args: &[&str]| {
        std::process::Command::new(env!("CARGO_BIN_EXE_ffc"))
            .args(args)
            .output()
            .expect("run the ffc binary")
            .status
            .code()
    };
    assert_eq!(run(&["--ring", "m=1,N=2", "-e", "(rinv e1)"]), Some(1));
    assert_eq!(run(&["--ring", "m=1,N=2", "-e", "(rinv e1"]), Some(2));
    assert_eq!(run(&["--ring", "m=1,N=2", "-e", "(nonsense 1)"]), Some(2));
    assert_eq!(run(&["--ring", "m=1,N=2", "-e", "(radd 1 1)"]), Some(0));
    passed(
        8,
        "CLI golden corpus",
        format!("{} programs byte-identical through the binary", cases),
    );
}

fn parse_ring_header(s: &str) -> (u32, (u32, u32)) {
    let mut m = 0;
    let mut n = 1;
    let mut g = 0;
    for part in s.split(',') {
        if let Some((k, v)) = part.split_once('=') {
            let val: u32 = v.trim().parse().unwrap();
            match k.trim() {
                "m" => m = val,
                "N" => n = val,
                "g" => g = val,
                _ => {}
            }
        }
    }
    (m, (n, g))
}
