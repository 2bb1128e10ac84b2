use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use yamabe_core::tensor::{
    conformal_christoffel, curvature_pack, hessian_conformal, ricci_conformal, scalar_conformal, schouten_endomorphism,
    sigma_all,
};
use yamabe_core::{Jet, Real, ScalarField, Signature};

#[derive(Clone)]
struct Coeffs {
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl Coeffs {
    fn random(n: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut v = || (0..n).map(|_| rng.gen_range(-0.2..0.2)).collect::<Vec<f64>>();
        Coeffs { a: v(), b: v(), c: v() }
    }

    fn eval<T: Real>(&self, x: &[T]) -> T {
        let lin = |w: &[f64]| {
            let mut s = T::cst(0.0);
            for (wi, xi) in w.iter().zip(x) {
                s = s + *xi * *wi;
            }
            s
        };
        let q = lin(&self.c);
        lin(&self.a) + lin(&self.b).exp() * 0.3 + q * q * 2.0 + 1.2
    }

    fn field(&self) -> ScalarField {
        let me = self.clone();
        ScalarField::new(self.a.len(), move |x: &[Jet]| me.eval(x)).positive()
    }
}

fn random_signature(n: usize, rng: &mut ChaCha8Rng) -> Signature {
    Signature::new((0..n).map(|_| if rng.gen_bool(0.3) { -1 } else { 1 }).collect()).unwrap()
}

fn random_point(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect()
}

// Levi-Civita data of g = diag(εᵢ)/φ² from exact jets of ψ = φ⁻², using
// only the general coordinate formulas.
struct General {
    n: usize,
    gamma: Vec<f64>,
    dgamma: Vec<f64>,
}

impl General {
    fn new(c: &Coeffs, sig: &Signature, x: &[f64]) -> Self {
        let n = x.len();
        let psi = c.eval(&Jet::seed(x)).powi(-2);
        let g = |i: usize, j: usize| if i == j { sig.eps(i) * psi.value() } else { 0.0 };
        let dg = |m: usize, i: usize, j: usize| if i == j { sig.eps(i) * psi.d(m) } else { 0.0 };
        let ddg = |m: usize, l: usize, i: usize, j: usize| if i == j { sig.eps(i) * psi.dd(m, l) } else { 0.0 };
        let gm = DMatrix::from_fn(n, n, g);
        let ginv = gm.try_inverse().unwrap();
        let dginv = |m: usize, k: usize, l: usize| {
            let mut s = 0.0;
            for a in 0..n {
                for b in 0..n {
                    s -= ginv[(k, a)] * dg(m, a, b) * ginv[(b, l)];
                }
            }
            s
        };
        let idx = |k: usize, i: usize, j: usize| (k * n + i) * n + j;
        let mut gamma = vec![0.0; n * n * n];
        let mut dgamma = vec![0.0; n * n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        s += 0.5 * ginv[(k, l)] * (dg(i, l, j) + dg(j, l, i) - dg(l, i, j));
                    }
                    gamma[idx(k, i, j)] = s;
                    for m in 0..n {
                        let mut d = 0.0;
                        for l in 0..n {
                            d += 0.5 * dginv(m, k, l) * (dg(i, l, j) + dg(j, l, i) - dg(l, i, j));
                            d += 0.5 * ginv[(k, l)] * (ddg(m, i, l, j) + ddg(m, j, l, i) - ddg(m, l, i, j));
                        }
                        dgamma[m * n * n * n + idx(k, i, j)] = d;
                    }
                }
            }
        }
        General { n, gamma, dgamma }
    }

    fn gamma(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[(k * self.n + i) * self.n + j]
    }

    fn dgamma(&self, m: usize, k: usize, i: usize, j: usize) -> f64 {
        let n = self.n;
        self.dgamma[m * n * n * n + (k * n + i) * n + j]
    }

    fn ricci(&self) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |i, j| {
            let mut s = 0.0;
            for k in 0..n {
                s += self.dgamma(k, k, i, j) - self.dgamma(j, k, i, k);
                for l in 0..n {
                    s += self.gamma(k, k, l) * self.gamma(l, i, j) - self.gamma(k, j, l) * self.gamma(l, i, k);
                }
            }
            s
        })
    }
}

fn close(a: f64, b: f64, tol: f64, scale: f64) -> bool {
    (a - b).abs() <= tol * scale.max(a.abs()).max(b.abs()).max(1.0)
}

#[test]
fn christoffel_and_ricci_match_general_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let n = rng.gen_range(2..=6);
        let c = Coeffs::random(n, &mut rng);
        let sig = random_signature(n, &mut rng);
        let x = random_point(n, &mut rng);
        let gen = General::new(&c, &sig, &x);
        let chr = conformal_christoffel(&c.field(), &sig, &x).unwrap();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    assert!(close(chr.get(k, i, j), gen.gamma(k, i, j), 1e-12, 0.0));
                }
            }
        }
        let ric = ricci_conformal(&c.field(), &sig, &x).unwrap();
        let oracle = gen.ricci();
        let scale = oracle.amax();
        for (a, b) in ric.iter().zip(oracle.iter()) {
            assert!(close(*a, *b, 1e-11, scale), "{sig} {a} {b}");
        }
    }
}

#[test]
fn christoffel_matches_finite_differences_of_metric() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let h = 1e-5;
    for _ in 0..20 {
        let n = rng.gen_range(2..=5);
        let c = Coeffs::random(n, &mut rng);
        let sig = random_signature(n, &mut rng);
        let x = random_point(n, &mut rng);
        let psi = |y: &[f64]| c.eval(y).powi(-2);
        let dpsi = |m: usize| {
            let mut p = x.clone();
            let mut q = x.clone();
            p[m] += h;
            q[m] -= h;
            (psi(&p) - psi(&q)) / (2.0 * h)
        };
        let chr = conformal_christoffel(&c.field(), &sig, &x).unwrap();
        let p0 = psi(&x);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    // Diagonal metric: Γᵏᵢⱼ = (δ_kj ψᵢ εⱼ + δ_ki ψⱼ εᵢ − δᵢⱼ εᵢ ψ_k) / (2 ε_k ψ).
                    let mut s = 0.0;
                    if k == j {
                        s += sig.eps(j) * dpsi(i);
                    }
                    if k == i {
                        s += sig.eps(i) * dpsi(j);
                    }
                    if i == j {
                        s -= sig.eps(i) * dpsi(k);
                    }
                    let fd = s / (2.0 * sig.eps(k) * p0);
                    assert!((chr.get(k, i, j) - fd).abs() < 1e-8, "{} {}", chr.get(k, i, j), fd);
                }
            }
        }
    }
}

#[test]
fn hessian_equals_coordinate_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..40 {
        let n = rng.gen_range(2..=6);
        let c = Coeffs::random(n, &mut rng);
        let cf = Coeffs::random(n, &mut rng);
        let sig = random_signature(n, &mut rng);
        let x = random_point(n, &mut rng);
        let f = cf.field();
        let hess = hessian_conformal(&f, &c.field(), &sig, &x).unwrap();
        let fj = f.jet(&x).unwrap();
        let gen = General::new(&c, &sig, &x);
        for i in 0..n {
            for j in 0..n {
                let mut v = fj.dd(i, j);
                for k in 0..n {
                    v -= gen.gamma(k, i, j) * fj.d(k);
                }
                assert!(close(hess[(i, j)], v, 1e-12, 0.0), "{} {}", hess[(i, j)], v);
            }
        }
    }
}

#[test]
fn traces_are_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..40 {
        let n = rng.gen_range(2..=6);
        let c = Coeffs::random(n, &mut rng);
        let sig = random_signature(n, &mut rng);
        let x = random_point(n, &mut rng);
        let phi = c.field();
        let p = phi.value(&x).unwrap();
        let ric = ricci_conformal(&phi, &sig, &x).unwrap();
        let scal = scalar_conformal(&phi, &sig, &x).unwrap();
        let trace: f64 = (0..n).map(|i| sig.eps(i) * p * p * ric[(i, i)]).sum();
        assert!(close(scal, trace, 1e-12, 0.0), "{scal} {trace}");
        let endo = schouten_endomorphism(&phi, &sig, &x).unwrap();
        let s1 = sigma_all(&endo)[0];
        assert!(close(s1, endo.trace(), 1e-12, 0.0));
        assert!(close(s1, scal / (2.0 * (n as f64 - 1.0)), 1e-12, 0.0), "{s1} {scal}");
        let pack = curvature_pack(&phi, &sig, &x).unwrap();
        assert_eq!(pack.scalar, scal);
    }
}

#[test]
fn sigma_matches_eigenvalues_and_characteristic_polynomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for case in 0..80 {
        let n = rng.gen_range(2..=6);
        let c = Coeffs::random(n, &mut rng);
        let sig = if case % 2 == 0 {
            Signature::euclidean(n)
        } else {
            random_signature(n, &mut rng)
        };
        let x = random_point(n, &mut rng);
        let endo = schouten_endomorphism(&c.field(), &sig, &x).unwrap();
        let sig_k = sigma_all(&endo);
        let s = endo.amax().max(1e-12);
        let tol = |k: usize| 1e-9 * s.powi(k as i32) * binom(n, k);
        // det(I + tA) = Σ σ_k t^k, sampled at n + 1 Chebyshev nodes.
        let ts: Vec<f64> = (0..=n)
            .map(|j| (std::f64::consts::PI * (j as f64 + 0.5) / (n + 1) as f64).cos() / s)
            .collect();
        let vander = DMatrix::from_fn(n + 1, n + 1, |i, j| ts[i].powi(j as i32));
        let dets = nalgebra::DVector::from_iterator(
            n + 1,
            ts.iter().map(|t| (DMatrix::identity(n, n) + &endo * *t).determinant()),
        );
        let coef = vander.lu().solve(&dets).unwrap();
        for k in 1..=n {
            assert!(
                (sig_k[k - 1] - coef[k]).abs() <= tol(k),
                "k={k} {} {}",
                sig_k[k - 1],
                coef[k]
            );
        }
        if sig.is_riemannian() {
            let eig = endo.clone().symmetric_eigen().eigenvalues;
            let mut e = vec![0.0; n + 1];
            e[0] = 1.0;
            for lam in eig.iter() {
                for k in (1..=n).rev() {
                    e[k] += e[k - 1] * lam;
                }
            }
            for k in 1..=n {
                assert!((sig_k[k - 1] - e[k]).abs() <= tol(k), "k={k}");
            }
        }
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
