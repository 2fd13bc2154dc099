//! Small trainable encoder: embeddings, one self-attention block, one
//! feed-forward block, both with residual connections.
//!
//!   h0_i  = tok[id_i] + pos[i] + seg[segment_i] + m_i * match
//!   q/k/v = affine(h0)         (single head)
//!   a_i   = softmax_j(q_i . k_j / sqrt(D) + rel[clip(j - i)])
//!   z_i   = h0_i + Wo (sum_j a_ij v_j) + bo
//!   out_i = z_i + W2 tanh(W1 z_i + b1) + b2
//!
//! Two input-side devices carry most of the signal on paired sequences. The
//! exact-match flag m_i comes straight from
//! [`TokenizedPair::match_flags`], so one learned vector marks query terms
//! found in the sentence and vice versa. The attention logits add a learned
//! bias per clipped relative offset, which lets a single layer express
//! "look at the previous token" without wiring every absolute position
//! pair.
//!
//! The pooled vector is `out_0`. All parameters live in one flat vector in
//! [`TinyEncoder::param_specs`] order; `param_grads` runs the matching
//! hand-written backward pass, which the tests pin against central finite
//! differences. tanh keeps every path smooth, so the checks are tight.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math;
use crate::{Error, Result};

use super::{Encoder, EncoderOutput, ParamSpec, TokenizedPair, MAX_TOKENS};

/// Embedding and hidden width.
pub const TINY_DIM: usize = 32;
/// Feed-forward inner width.
pub const TINY_FFN_DIM: usize = 64;
/// Parameter budget; constructors refuse vocabularies that would blow it.
pub const TINY_MAX_PARAMS: usize = 1_000_000;

const D: usize = TINY_DIM;
const F: usize = TINY_FFN_DIM;
/// Relative offsets beyond +-REL_WINDOW share the edge buckets.
const REL_WINDOW: isize = 8;
const REL_BUCKETS: usize = 2 * REL_WINDOW as usize + 1;

fn rel_bucket(i: usize, j: usize) -> usize {
    let d = (j as isize - i as isize).clamp(-REL_WINDOW, REL_WINDOW);
    (d + REL_WINDOW) as usize
}

/// Flat-vector offsets of every tensor, in declaration order.
#[derive(Debug, Clone, Copy)]
struct Layout {
    tok: usize,
    pos: usize,
    seg: usize,
    mat: usize,
    qw: usize,
    qb: usize,
    kw: usize,
    kb: usize,
    vw: usize,
    vb: usize,
    ow: usize,
    ob: usize,
    rel: usize,
    w1: usize,
    b1: usize,
    w2: usize,
    b2: usize,
    total: usize,
}

impl Layout {
    fn new(vocab_size: usize) -> Layout {
        let tok = 0;
        let pos = tok + vocab_size * D;
        let seg = pos + MAX_TOKENS * D;
        let mat = seg + 2 * D;
        let qw = mat + D;
        let qb = qw + D * D;
        let kw = qb + D;
        let kb = kw + D * D;
        let vw = kb + D;
        let vb = vw + D * D;
        let ow = vb + D;
        let ob = ow + D * D;
        let rel = ob + D;
        let w1 = rel + REL_BUCKETS;
        let b1 = w1 + F * D;
        let w2 = b1 + F;
        let b2 = w2 + D * F;
        let total = b2 + D;
        Layout { tok, pos, seg, mat, qw, qb, kw, kb, vw, vb, ow, ob, rel, w1, b1, w2, b2, total }
    }
}

/// Trainable encoder with a fixed tiny architecture. Construction is
/// deterministic in (seed, vocab_size).
#[derive(Debug, Clone)]
pub struct TinyEncoder {
    vocab_size: usize,
    layout: Layout,
    params: Vec<f64>,
}

impl TinyEncoder {
    pub fn new(seed: u64, vocab_size: usize) -> Result<TinyEncoder> {
        let layout = Layout::new(vocab_size);
        if layout.total >= TINY_MAX_PARAMS {
            return Err(Error::BadConfig { what: "vocabulary too large for the tiny parameter budget" });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = vec![0.0; layout.total];
        let embed_scale = 0.5;
        // Token vectors start small: ids absent from the few-shot sample
        // keep their init all the way to inference, where they are pure
        // noise on the span scorers.
        let tok_scale = 0.2;
        let attn_scale = math::sqrt(6.0 / (D + D) as f64);
        let ffn1_scale = math::sqrt(6.0 / (D + F) as f64);
        // Residual-feeding projections start half-sized; biases (including
        // the relative-offset ones) start at zero.
        let fills: [(usize, usize, f64); 17] = [
            (layout.tok, vocab_size * D, tok_scale),
            (layout.pos, MAX_TOKENS * D, embed_scale),
            (layout.seg, 2 * D, embed_scale),
            (layout.mat, D, embed_scale),
            (layout.qw, D * D, attn_scale),
            (layout.qb, D, 0.0),
            (layout.kw, D * D, attn_scale),
            (layout.kb, D, 0.0),
            (layout.vw, D * D, attn_scale),
            (layout.vb, D, 0.0),
            (layout.ow, D * D, attn_scale * 0.5),
            (layout.ob, D, 0.0),
            (layout.rel, REL_BUCKETS, 0.0),
            (layout.w1, F * D, ffn1_scale),
            (layout.b1, F, 0.0),
            (layout.w2, D * F, ffn1_scale * 0.5),
            (layout.b2, D, 0.0),
        ];
        for (start, len, scale) in fills {
            for p in &mut params[start..start + len] {
                *p = (rng.gen::<f64>() * 2.0 - 1.0) * scale;
            }
        }
        Ok(TinyEncoder { vocab_size, layout, params })
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    fn tensor(&self, start: usize, len: usize) -> &[f64] {
        &self.params[start..start + len]
    }

    /// `y = W x + b` for a row-major `[rows x cols]` matrix.
    fn affine(w: &[f64], b: &[f64], x: &[f64], rows: usize, cols: usize, y: &mut [f64]) {
        for r in 0..rows {
            let row = &w[r * cols..(r + 1) * cols];
            let mut acc = b[r];
            for c in 0..cols {
                acc += row[c] * x[c];
            }
            y[r] = acc;
        }
    }

    fn forward(&self, pair: &TokenizedPair) -> Cache {
        let n = pair.len();
        let l = self.layout;
        let scale = 1.0 / math::sqrt(D as f64);
        let m: Vec<f64> =
            pair.match_flags.iter().map(|&f| if f { 1.0 } else { 0.0 }).collect();

        let mut h0 = vec![0.0; n * D];
        for i in 0..n {
            let tok = &self.params[l.tok + pair.ids[i] as usize * D..][..D];
            let pos = &self.params[l.pos + i * D..][..D];
            let seg = &self.params[l.seg + pair.segments[i] as usize * D..][..D];
            let mat = &self.params[l.mat..][..D];
            for d in 0..D {
                h0[i * D + d] = tok[d] + pos[d] + seg[d] + m[i] * mat[d];
            }
        }

        let mut q = vec![0.0; n * D];
        let mut k = vec![0.0; n * D];
        let mut v = vec![0.0; n * D];
        for i in 0..n {
            let x = &h0[i * D..(i + 1) * D];
            Self::affine(self.tensor(l.qw, D * D), self.tensor(l.qb, D), x, D, D, &mut q[i * D..(i + 1) * D]);
            Self::affine(self.tensor(l.kw, D * D), self.tensor(l.kb, D), x, D, D, &mut k[i * D..(i + 1) * D]);
            Self::affine(self.tensor(l.vw, D * D), self.tensor(l.vb, D), x, D, D, &mut v[i * D..(i + 1) * D]);
        }

        let mut attn = vec![0.0; n * n];
        for i in 0..n {
            let qi = &q[i * D..(i + 1) * D];
            for j in 0..n {
                let kj = &k[j * D..(j + 1) * D];
                let mut dot = 0.0;
                for d in 0..D {
                    dot += qi[d] * kj[d];
                }
                attn[i * n + j] = dot * scale + self.params[l.rel + rel_bucket(i, j)];
            }
            math::softmax_in_place(&mut attn[i * n..(i + 1) * n]);
        }

        let mut ctx = vec![0.0; n * D];
        for i in 0..n {
            for j in 0..n {
                let a = attn[i * n + j];
                let vj = &v[j * D..(j + 1) * D];
                for d in 0..D {
                    ctx[i * D + d] += a * vj[d];
                }
            }
        }

        let mut z = vec![0.0; n * D];
        let mut proj = vec![0.0; D];
        for i in 0..n {
            Self::affine(self.tensor(l.ow, D * D), self.tensor(l.ob, D), &ctx[i * D..(i + 1) * D], D, D, &mut proj);
            for d in 0..D {
                z[i * D + d] = h0[i * D + d] + proj[d];
            }
        }

        let mut r = vec![0.0; n * F];
        let mut out = vec![0.0; n * D];
        let mut hidden = vec![0.0; F];
        let mut back = vec![0.0; D];
        for i in 0..n {
            let zi = &z[i * D..(i + 1) * D];
            Self::affine(self.tensor(l.w1, F * D), self.tensor(l.b1, F), zi, F, D, &mut hidden);
            for (c, h) in hidden.iter().enumerate() {
                r[i * F + c] = math::tanh(*h);
            }
            Self::affine(self.tensor(l.w2, D * F), self.tensor(l.b2, D), &r[i * F..(i + 1) * F], D, F, &mut back);
            for d in 0..D {
                out[i * D + d] = zi[d] + back[d];
            }
        }

        Cache { n, m, h0, q, k, v, attn, ctx, z, r, out }
    }
}

struct Cache {
    n: usize,
    /// Exact-match flags as 0.0 / 1.0.
    m: Vec<f64>,
    h0: Vec<f64>,
    q: Vec<f64>,
    k: Vec<f64>,
    v: Vec<f64>,
    attn: Vec<f64>,
    ctx: Vec<f64>,
    z: Vec<f64>,
    r: Vec<f64>,
    out: Vec<f64>,
}

impl Encoder for TinyEncoder {
    fn dim(&self) -> usize {
        D
    }

    fn encode(&self, pair: &TokenizedPair) -> EncoderOutput {
        EncoderOutput::new(self.forward(pair).out, D).expect("row-major by construction")
    }

    fn lm_logits(&self, pair: &TokenizedPair, position: usize) -> Vec<f64> {
        // Tied with the token embedding table.
        let cache = self.forward(pair);
        let h = &cache.out[position * D..(position + 1) * D];
        (0..self.vocab_size)
            .map(|vid| {
                let e = &self.params[self.layout.tok + vid * D..][..D];
                e.iter().zip(h).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    fn param_specs(&self) -> Vec<ParamSpec> {
        vec![
            ParamSpec { name: "tok_embed", shape: [self.vocab_size, D] },
            ParamSpec { name: "pos_embed", shape: [MAX_TOKENS, D] },
            ParamSpec { name: "seg_embed", shape: [2, D] },
            ParamSpec { name: "match_embed", shape: [1, D] },
            ParamSpec { name: "attn_q_w", shape: [D, D] },
            ParamSpec { name: "attn_q_b", shape: [1, D] },
            ParamSpec { name: "attn_k_w", shape: [D, D] },
            ParamSpec { name: "attn_k_b", shape: [1, D] },
            ParamSpec { name: "attn_v_w", shape: [D, D] },
            ParamSpec { name: "attn_v_b", shape: [1, D] },
            ParamSpec { name: "attn_o_w", shape: [D, D] },
            ParamSpec { name: "attn_o_b", shape: [1, D] },
            ParamSpec { name: "attn_rel_bias", shape: [REL_BUCKETS, 1] },
            ParamSpec { name: "ffn_w1", shape: [F, D] },
            ParamSpec { name: "ffn_b1", shape: [1, F] },
            ParamSpec { name: "ffn_w2", shape: [D, F] },
            ParamSpec { name: "ffn_b2", shape: [1, D] },
        ]
    }

    fn params(&self) -> Vec<f64> {
        self.params.clone()
    }

    fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.layout.total {
            return Err(Error::DimMismatch {
                what: "encoder parameters",
                expected: self.layout.total,
                found: params.len(),
            });
        }
        self.params.copy_from_slice(params);
        Ok(())
    }

    fn param_grads(&self, pair: &TokenizedPair, d_output: &[f64]) -> Vec<f64> {
        let cache = self.forward(pair);
        let n = cache.n;
        assert_eq!(d_output.len(), n * D, "output gradient shape");
        let l = self.layout;
        let scale = 1.0 / math::sqrt(D as f64);
        let mut g = vec![0.0; l.total];

        // Feed-forward block backward; dz collects the residual path too.
        let mut dz = d_output.to_vec();
        for i in 0..n {
            let dy = &d_output[i * D..(i + 1) * D];
            let ri = &cache.r[i * F..(i + 1) * F];
            let zi = &cache.z[i * D..(i + 1) * D];
            let mut dr = [0.0; F];
            for row in 0..D {
                g[l.b2 + row] += dy[row];
                let w2_row = &self.params[l.w2 + row * F..][..F];
                let gw2_row = &mut g[l.w2 + row * F..l.w2 + (row + 1) * F];
                for c in 0..F {
                    gw2_row[c] += dy[row] * ri[c];
                    dr[c] += w2_row[c] * dy[row];
                }
            }
            for c in 0..F {
                let du = dr[c] * (1.0 - ri[c] * ri[c]);
                g[l.b1 + c] += du;
                let gw1_row = &mut g[l.w1 + c * D..l.w1 + (c + 1) * D];
                for d in 0..D {
                    gw1_row[d] += du * zi[d];
                }
                let w1_row = &self.params[l.w1 + c * D..][..D];
                for d in 0..D {
                    dz[i * D + d] += w1_row[d] * du;
                }
            }
        }

        // Attention output projection; dh0 collects the residual path.
        let mut dh0 = dz.clone();
        let mut dctx = vec![0.0; n * D];
        for i in 0..n {
            let dzi = &dz[i * D..(i + 1) * D];
            let ci = &cache.ctx[i * D..(i + 1) * D];
            for row in 0..D {
                g[l.ob + row] += dzi[row];
                let ow_row = &self.params[l.ow + row * D..][..D];
                let gow_row = &mut g[l.ow + row * D..l.ow + (row + 1) * D];
                for c in 0..D {
                    gow_row[c] += dzi[row] * ci[c];
                    dctx[i * D + c] += ow_row[c] * dzi[row];
                }
            }
        }

        // Attention core.
        let mut dq = vec![0.0; n * D];
        let mut dk = vec![0.0; n * D];
        let mut dv = vec![0.0; n * D];
        let mut da = vec![0.0; n];
        for i in 0..n {
            let dci = &dctx[i * D..(i + 1) * D];
            let ai = &cache.attn[i * n..(i + 1) * n];
            let mut dot_sum = 0.0;
            for j in 0..n {
                let vj = &cache.v[j * D..(j + 1) * D];
                let mut daij = 0.0;
                for d in 0..D {
                    dv[j * D + d] += ai[j] * dci[d];
                    daij += dci[d] * vj[d];
                }
                da[j] = daij;
                dot_sum += ai[j] * daij;
            }
            for j in 0..n {
                // Softmax jacobian gives the raw logit gradient; the bias
                // sees it as-is, the dot product scaled.
                let de = ai[j] * (da[j] - dot_sum);
                g[l.rel + rel_bucket(i, j)] += de;
                let des = de * scale;
                let kj = &cache.k[j * D..(j + 1) * D];
                let qi = &cache.q[i * D..(i + 1) * D];
                for d in 0..D {
                    dq[i * D + d] += des * kj[d];
                    dk[j * D + d] += des * qi[d];
                }
            }
        }

        // The three input projections.
        for (dvec, w_off, b_off) in [(&dq, l.qw, l.qb), (&dk, l.kw, l.kb), (&dv, l.vw, l.vb)] {
            for i in 0..n {
                let dyi = &dvec[i * D..(i + 1) * D];
                let h0i = &cache.h0[i * D..(i + 1) * D];
                for row in 0..D {
                    g[b_off + row] += dyi[row];
                    let w_row = &self.params[w_off + row * D..][..D];
                    let gw_row = &mut g[w_off + row * D..w_off + (row + 1) * D];
                    for c in 0..D {
                        gw_row[c] += dyi[row] * h0i[c];
                        dh0[i * D + c] += w_row[c] * dyi[row];
                    }
                }
            }
        }

        // Embedding scatter.
        for i in 0..n {
            let dh = &dh0[i * D..(i + 1) * D];
            let tok_off = l.tok + pair.ids[i] as usize * D;
            let pos_off = l.pos + i * D;
            let seg_off = l.seg + pair.segments[i] as usize * D;
            for d in 0..D {
                g[tok_off + d] += dh[d];
                g[pos_off + d] += dh[d];
                g[seg_off + d] += dh[d];
                g[l.mat + d] += cache.m[i] * dh[d];
            }
        }

        g
    }
}
