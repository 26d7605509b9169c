//! Aaronson–Gottesman stabilizer tableau, used for noiseless reference runs.

use crate::circuit::Circuit;
use crate::noise::OpKind;

/// Tableau over `n` qubits: rows `0..n` are destabilizers, `n..2n`
/// stabilizers, row `2n` is scratch space.
#[derive(Debug, Clone)]
pub struct Tableau {
    n: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    r: Vec<bool>,
}

impl Tableau {
    /// The all-`|0>` state.
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let rows = 2 * n + 1;
        let mut t = Tableau { n, words, x: vec![0; rows * words], z: vec![0; rows * words], r: vec![false; rows] };
        for q in 0..n {
            t.set_x(q, q, true);
            t.set_z(n + q, q, true);
        }
        t
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    fn bit(v: &[u64], words: usize, row: usize, q: usize) -> bool {
        v[row * words + q / 64] >> (q % 64) & 1 == 1
    }

    fn xb(&self, row: usize, q: usize) -> bool {
        Self::bit(&self.x, self.words, row, q)
    }

    fn zb(&self, row: usize, q: usize) -> bool {
        Self::bit(&self.z, self.words, row, q)
    }

    fn set_x(&mut self, row: usize, q: usize, v: bool) {
        let w = &mut self.x[row * self.words + q / 64];
        *w = (*w & !(1 << (q % 64))) | ((v as u64) << (q % 64));
    }

    fn set_z(&mut self, row: usize, q: usize, v: bool) {
        let w = &mut self.z[row * self.words + q / 64];
        *w = (*w & !(1 << (q % 64))) | ((v as u64) << (q % 64));
    }

    /// Row `h` <- row `i` * row `h`, with the phase tracked exactly.
    fn rowsum(&mut self, h: usize, i: usize) {
        let (hw, iw) = (h * self.words, i * self.words);
        let (mut plus, mut minus) = (0u32, 0u32);
        for k in 0..self.words {
            let (x1, z1) = (self.x[iw + k], self.z[iw + k]);
            let (x2, z2) = (self.x[hw + k], self.z[hw + k]);
            let p = (x1 & z1 & z2 & !x2) | (x1 & !z1 & x2 & z2) | (!x1 & z1 & x2 & !z2);
            let m = (x1 & z1 & x2 & !z2) | (x1 & !z1 & z2 & !x2) | (!x1 & z1 & x2 & z2);
            plus += p.count_ones();
            minus += m.count_ones();
            self.x[hw + k] = x1 ^ x2;
            self.z[hw + k] = z1 ^ z2;
        }
        let total = 2 * (self.r[h] as i64 + self.r[i] as i64) + plus as i64 - minus as i64;
        self.r[h] = total.rem_euclid(4) == 2;
    }

    pub fn h(&mut self, a: usize) {
        for row in 0..2 * self.n {
            let (x, z) = (self.xb(row, a), self.zb(row, a));
            self.r[row] ^= x & z;
            self.set_x(row, a, z);
            self.set_z(row, a, x);
        }
    }

    pub fn cx(&mut self, a: usize, b: usize) {
        for row in 0..2 * self.n {
            let (xa, za, xb, zb) = (self.xb(row, a), self.zb(row, a), self.xb(row, b), self.zb(row, b));
            self.r[row] ^= xa & zb & !(xb ^ za);
            self.set_x(row, b, xb ^ xa);
            self.set_z(row, a, za ^ zb);
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        self.h(b);
        self.cx(a, b);
        self.h(b);
    }

    pub fn x_gate(&mut self, a: usize) {
        for row in 0..2 * self.n {
            self.r[row] ^= self.zb(row, a);
        }
    }

    /// Measure `Z_a`. Returns `(outcome, deterministic)`; random outcomes are
    /// fixed to 0.
    pub fn measure_z(&mut self, a: usize) -> (bool, bool) {
        let n = self.n;
        if let Some(p) = (n..2 * n).find(|&row| self.xb(row, a)) {
            for row in 0..2 * n {
                if row != p && self.xb(row, a) {
                    self.rowsum(row, p);
                }
            }
            let w = self.words;
            let (src, dst) = (p * w, (p - n) * w);
            self.x.copy_within(src..src + w, dst);
            self.z.copy_within(src..src + w, dst);
            self.r[p - n] = self.r[p];
            self.x[src..src + w].fill(0);
            self.z[src..src + w].fill(0);
            self.set_z(p, a, true);
            self.r[p] = false;
            (false, false)
        } else {
            let s = 2 * n;
            let w = self.words;
            self.x[s * w..(s + 1) * w].fill(0);
            self.z[s * w..(s + 1) * w].fill(0);
            self.r[s] = false;
            for row in 0..n {
                if self.xb(row, a) {
                    self.rowsum(s, row + n);
                }
            }
            (self.r[s], true)
        }
    }

    pub fn measure_x(&mut self, a: usize) -> (bool, bool) {
        self.h(a);
        let out = self.measure_z(a);
        self.h(a);
        out
    }

    pub fn reset_z(&mut self, a: usize) {
        if self.measure_z(a).0 {
            self.x_gate(a);
        }
    }

    pub fn reset_x(&mut self, a: usize) {
        self.h(a);
        self.reset_z(a);
        self.h(a);
    }
}

/// Noiseless measurement record of `circuit`, one entry per measurement:
/// `(outcome, deterministic)`. Noise channels are ignored.
pub fn reference_record(circuit: &Circuit) -> Vec<(bool, bool)> {
    let mut t = Tableau::new(circuit.num_qubits as usize);
    let mut out = Vec::with_capacity(circuit.num_measurements());
    for layer in &circuit.layers {
        for op in &layer.ideal_ops {
            let q: Vec<usize> = op.targets.iter().map(|&q| q as usize).collect();
            match op.kind {
                OpKind::ResetZ => t.reset_z(q[0]),
                OpKind::ResetX => t.reset_x(q[0]),
                OpKind::H => t.h(q[0]),
                OpKind::Cx => t.cx(q[0], q[1]),
                OpKind::Cz => t.cz(q[0], q[1]),
                OpKind::MeasureZ => out.push(t.measure_z(q[0])),
                OpKind::MeasureX => out.push(t.measure_x(q[0])),
            }
        }
    }
    out
}
