use gwsym::eta::{build_eta, eta_degree};
use gwsym::integrator::{
    covering_vertex_integral, genus0_integral, monomial_integral, stratum_integral, term_integrand, term_shape,
    Integrator,
};
use gwsym::series::PsiSeries;
use gwsym::strata::{contributing_terms, ContractionTerm, StrataConfig};
use gwsym::{BracketQuery, Rational};

fn terms(g: u32, powers: Vec<u32>) -> Vec<ContractionTerm> {
    let q = BracketQuery::new(g, powers).unwrap();
    let eta = build_eta(g, q.points(), None).unwrap();
    contributing_terms(&eta, &q, &StrataConfig::default()).unwrap()
}

fn two_pow(k: i32) -> Rational {
    Rational::from(2).pow(k)
}

/// `∫ ψ^k` at the retained point of the edgeless term.
fn top_psi(g: u32, k: u32) -> Rational {
    let t = terms(g, vec![k]);
    let main = t.iter().find(|x| x.num_edges() == 0).unwrap();
    let mut psi = vec![0u8; main.rho.target.half_edges.len()];
    let at = main.tail_weights.iter().find(|w| !w.weight.is_zero()).unwrap().half_edge;
    psi[at] = k as u8;
    monomial_integral(Integrator::default().kernel(), main, &psi).unwrap()
}

#[test]
fn main_stratum_integrals() {
    assert_eq!(top_psi(1, 1), two_pow(-6));
    assert_eq!(top_psi(2, 4), two_pow(-6) / Rational::from(3));
}

#[test]
fn label_degrees() {
    let n = |g| eta_degree(&build_eta(g, 1, None).unwrap()).recip();
    assert_eq!(n(1), Rational::new(8, 3));
    assert_eq!(n(2), Rational::new(4, 15));
}

#[test]
fn boundary_term_factors() {
    let it = Integrator::default();
    let t = terms(2, vec![4]);
    let boundary: Vec<_> = t.iter().filter(|x| x.num_edges() == 1).collect();
    assert_eq!(boundary.len(), 6);
    for term in boundary {
        assert_eq!(term.norm.recip(), Rational::from(4));
        let target = &term.rho.target;
        let e = term.edge_weights[0].edge;
        let germs = [e, target.half_edges[e].partner];
        for vd in &term.vertices {
            let at = target.half_edges_at(vd.vertex);
            if at.len() == 3 {
                let v = covering_vertex_integral(it.kernel(), &vd.datum, &[0, 0, 0]).unwrap();
                assert_eq!(v, Rational::new(1, 12));
                let mut exps = vec![0; 3];
                exps[0] = 1;
                assert!(covering_vertex_integral(it.kernel(), &vd.datum, &exps).unwrap().is_zero());
            } else {
                let exps: Vec<u32> = at.iter().map(|h| if germs.contains(h) { 3 } else { 0 }).collect();
                assert_eq!(covering_vertex_integral(it.kernel(), &vd.datum, &exps).unwrap(), two_pow(-10));
            }
        }
        let shape = term_shape(term, &[4]);
        let psi_e = PsiSeries::psi(shape.clone(), germs[0]).add(&PsiSeries::psi(shape, germs[1]));
        let integral = stratum_integral(it.kernel(), term, &psi_e.pow(3)).unwrap();
        assert_eq!(integral.get(&vec![0]), Some(&(two_pow(-12) / Rational::from(3))));
    }
}

#[test]
fn genus_two_decomposition() {
    let q = BracketQuery::new(2, vec![4]).unwrap();
    let b = Integrator::default().bracket(&q, None).unwrap();
    assert_eq!(b.value, Rational::new(1, 1152));
    let mut main = Vec::new();
    let mut boundary = Vec::new();
    for t in &b.terms {
        if t.edges == 0 {
            main.push(t.contribution.clone());
        } else {
            boundary.push(t.contribution.clone());
        }
    }
    assert_eq!(main, [Rational::new(1, 720)]);
    assert_eq!(boundary, vec![Rational::new(-1, 11520); 6]);
}

#[test]
fn integrand_degrees_match_strata() {
    for (g, powers) in [(1, vec![1, 1]), (1, vec![2, 1, 0]), (2, vec![4])] {
        let sum: u32 = powers.iter().sum();
        for term in terms(g, powers.clone()) {
            let dim: u32 = (0..term.rho.target.num_vertices())
                .map(|v| term.rho.target.valence(v) as u32 - 3)
                .sum();
            let integrand = term_integrand(&term, &powers);
            let k = Integrator::default();
            for (m, _) in integrand.terms() {
                let (z, psi) = m.split_at(powers.len());
                let zdeg: u32 = z.iter().map(|&x| x as u32).sum();
                let pdeg: u32 = psi.iter().map(|&x| x as u32).sum();
                if zdeg == sum && !monomial_integral(k.kernel(), &term, psi).unwrap().is_zero() {
                    assert_eq!(pdeg, dim);
                }
            }
        }
    }
}

#[test]
fn genus0_symmetry_and_string() {
    let all = |n: usize| -> Vec<Vec<u32>> {
        let total = n as u32 - 3;
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|v: Vec<u32>| (0..=total).map(move |k| [v.clone(), vec![k]].concat()))
                .collect();
        }
        out.retain(|v| v.iter().sum::<u32>() == total);
        out
    };
    for n in 4..=8 {
        for k in all(n) {
            let v = genus0_integral(&k).unwrap();
            let mut rev = k.clone();
            rev.reverse();
            assert_eq!(genus0_integral(&rev).unwrap(), v);
            if let Some(p) = k.iter().position(|&x| x == 0) {
                let mut rest = k.clone();
                rest.remove(p);
                let mut rhs = Rational::zero();
                for i in 0..rest.len() {
                    if rest[i] > 0 {
                        let mut lower = rest.clone();
                        lower[i] -= 1;
                        rhs += genus0_integral(&lower).unwrap();
                    }
                }
                assert_eq!(v, rhs, "{k:?}");
            }
        }
    }
}
