//! Gate amplitudes recomputed from the permanent of the network's
//! single-photon transfer matrix, independent of the Fock-space expansion.

#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::FRAC_1_SQRT_2;

use qlsw_core::Complex64;

pub type C = Complex64;
const Z: C = C::new(0.0, 0.0);
const O: C = C::new(1.0, 0.0);
const IM: C = C::new(0.0, 1.0);

/// Dense transfer matrix over `n` spatial modes × (H, V); column = input.
struct Network {
    n: usize,
    u: Vec<Vec<C>>,
}

impl Network {
    fn new(n: usize) -> Self {
        let mut u = vec![vec![Z; 2 * n]; 2 * n];
        for (i, row) in u.iter_mut().enumerate() {
            row[i] = O;
        }
        Self { n, u }
    }

    /// Left-multiplies by an element given as a block map
    /// (out spatial, in spatial) → 2×2 polarization block.
    fn then(&mut self, blocks: &[(usize, usize, [[C; 2]; 2])], touched: &[usize]) {
        let dim = 2 * self.n;
        let mut e = vec![vec![Z; dim]; dim];
        for i in 0..dim {
            if !touched.contains(&(i / 2)) {
                e[i][i] = O;
            }
        }
        for &(out, inp, b) in blocks {
            for p in 0..2 {
                for q in 0..2 {
                    e[2 * out + p][2 * inp + q] += b[p][q];
                }
            }
        }
        let mut next = vec![vec![Z; dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                next[i][j] = (0..dim).map(|k| e[i][k] * self.u[k][j]).sum();
            }
        }
        self.u = next;
    }

    fn splitter(&mut self, a: usize, b: usize, th: f64, tv: f64) {
        let rh = (1.0 - th * th).sqrt();
        let rv = (1.0 - tv * tv).sqrt();
        let t = [[C::new(th, 0.0), Z], [Z, C::new(tv, 0.0)]];
        let r = [[IM * rh, Z], [Z, IM * rv]];
        self.then(&[(a, a, t), (b, b, t), (b, a, r), (a, b, r)], &[a, b]);
    }

    fn pbs(&mut self, a: usize, b: usize, pass: [C; 2], block: [C; 2]) {
        let proj = |v: [C; 2], s: C| {
            [
                [s * v[0] * v[0].conj(), s * v[0] * v[1].conj()],
                [s * v[1] * v[0].conj(), s * v[1] * v[1].conj()],
            ]
        };
        let p = proj(pass, O);
        let q = proj(block, IM);
        self.then(&[(a, a, p), (b, b, p), (b, a, q), (a, b, q)], &[a, b]);
    }

    fn hadamard_plate(&mut self, a: usize) {
        let h = C::new(FRAC_1_SQRT_2, 0.0);
        self.then(&[(a, a, [[h, h], [h, -h]])], &[a]);
    }
}

fn permanent(m: &[Vec<C>]) -> C {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = Z;
    permute(&mut perm, 0, &mut |p| {
        total += (0..n).map(|i| m[i][p[i]]).product::<C>()
    });
    total
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

fn sub(u: &[Vec<C>], outs: &[usize], ins: &[usize]) -> Vec<Vec<C>> {
    outs.iter()
        .map(|&o| ins.iter().map(|&i| u[o][i]).collect())
        .collect()
}

pub fn cnot(c: [C; 2], t: [C; 2]) -> [C; 4] {
    [c[0] * t[0], c[0] * t[1], c[1] * t[1], c[1] * t[0]]
}

pub fn inputs() -> Vec<([C; 2], [C; 2])> {
    let h = FRAC_1_SQRT_2;
    let controls = [
        [O, Z],
        [Z, O],
        [C::new(h, 0.0), C::new(h, 0.0)],
        [C::new(h, 0.0), C::new(-h, 0.0)],
        [C::new(h, 0.0), C::new(0.0, h)],
        [C::new(h, 0.0), C::new(0.0, -h)],
    ];
    controls
        .iter()
        .flat_map(|&c| [[O, Z], [Z, O]].map(move |t| (c, t)))
        .collect()
}

pub fn fidelity(psi: &[C; 4], target: &[C; 4]) -> f64 {
    let n: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
    psi.iter()
        .zip(target)
        .map(|(a, b)| b.conj() * a)
        .sum::<C>()
        .norm_sqr()
        / n
}

/// Heralded gate output (unnormalised, control first) and its probability.
pub fn heralded(c: [C; 2], t: [C; 2]) -> ([C; 4], f64) {
    // Spatial: 0 control, 1 target, 2 ancilla (control side), 3 ancilla (target side).
    let h = C::new(FRAC_1_SQRT_2, 0.0);
    let mut net = Network::new(4);
    net.pbs(0, 2, [O, Z], [Z, O]);
    net.pbs(1, 3, [h, h], [h, -h]);
    let minus = [h, -h];
    let vert = [Z, O];
    let mut psi = [Z; 4];
    for x in 0..2 {
        for y in 0..2 {
            let mut amp = Z;
            for cp in 0..2 {
                for tp in 0..2 {
                    for k in 0..2 {
                        let coeff = c[cp] * t[tp] * h;
                        let ins = [cp, 2 + tp, 4 + k, 6 + k];
                        for u in 0..2 {
                            for w in 0..2 {
                                let outs = [x, 2 + y, 4 + u, 6 + w];
                                let det = minus[u].conj() * vert[w].conj();
                                amp += coeff * det * permanent(&sub(&net.u, &outs, &ins));
                            }
                        }
                    }
                }
            }
            psi[2 * x + y] = amp;
        }
    }
    let p = psi.iter().map(|a| a.norm_sqr()).sum();
    (psi, p)
}

/// Destructive gate output (unnormalised, control first) and its probability.
pub fn destructive(c: [C; 2], t: [C; 2]) -> ([C; 4], f64) {
    // Spatial: 0 control, 1 target, 2 and 3 loss paths.
    let third = (1.0f64 / 3.0).sqrt();
    let mut net = Network::new(4);
    net.hadamard_plate(1);
    net.splitter(0, 1, 1.0, third);
    net.splitter(0, 2, third, 1.0);
    net.splitter(1, 3, third, 1.0);
    net.hadamard_plate(1);
    let mut psi = [Z; 4];
    for x in 0..2 {
        for y in 0..2 {
            let mut amp = Z;
            for cp in 0..2 {
                for tp in 0..2 {
                    amp += c[cp] * t[tp] * permanent(&sub(&net.u, &[x, 2 + y], &[cp, 2 + tp]));
                }
            }
            psi[2 * x + y] = amp;
        }
    }
    let p = psi.iter().map(|a| a.norm_sqr()).sum();
    (psi, p)
}
