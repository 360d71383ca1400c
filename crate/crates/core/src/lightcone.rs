//! Bounded fan-in block circuits and their lightcones.
//!
//! Wires are numbered: the `n·k` input bits come first (block `j` owns bits
//! `j·k .. (j+1)·k`), then one new wire per gate in listing order. A gate
//! may only read wires defined before it, which makes every circuit acyclic
//! by construction. Lightcones are syntactic (reachability), so they
//! over-approximate semantic influence.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::{TelepInstance, TelepOutcome};
use crate::error::{Error, Result};
use crate::group::PauliLabel;
use crate::hashing::StableHasher;
use crate::oracle::TelepOracle;
use crate::reduction::EmbeddingParams;

/// Input block width for encoding a Clifford.
pub const TELEP_K: usize = 5;
/// Output block width for encoding a Pauli.
pub const TELEP_R: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub inputs: Vec<usize>,
    pub output: usize,
    /// `table[Σ bit_i << i]` over `inputs` in order.
    pub table: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCircuit {
    pub nu: usize,
    pub depth: usize,
    pub k: usize,
    pub r: usize,
    pub n: usize,
    pub s: usize,
    pub gates: Vec<Gate>,
    /// Output wires, `s·r` of them. Defaults to the outputs of the last
    /// `s·r` gates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<usize>>,
}

/// Which `L` to use: `⌊n/(4ℓ)⌋` for the counting bounds, `⌊n/(8ℓ)⌋` for
/// choosing the embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Window {
    Counting,
    Embedding,
}

impl Window {
    pub fn length(self, n: usize, ell: usize) -> usize {
        let div = match self {
            Window::Counting => 4,
            Window::Embedding => 8,
        };
        n / (div * ell.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LightconeReport {
    pub n: usize,
    pub s: usize,
    pub locality: usize,
    pub window: Window,
    #[serde(rename = "L")]
    pub l: usize,
    pub forward: Vec<Vec<usize>>,
    pub backward: Vec<Vec<usize>>,
    pub good: Vec<usize>,
    pub bad: Vec<usize>,
    pub limited_signaling: Vec<usize>,
    pub good_upper: usize,
    pub limited_signaling_upper: usize,
    pub both_upper: usize,
}

impl BlockCircuit {
    pub fn from_json(s: &str) -> Result<Self> {
        let c: BlockCircuit = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }

    pub fn num_inputs(&self) -> usize {
        self.n * self.k
    }

    fn output_wires(&self) -> Vec<usize> {
        match &self.outputs {
            Some(w) => w.clone(),
            None => {
                let m = self.s * self.r;
                self.gates[self.gates.len().saturating_sub(m)..]
                    .iter()
                    .map(|g| g.output)
                    .collect()
            }
        }
    }

    /// Check wiring, fan-in, truth tables and the declared depth.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidCircuit(msg));
        if self.n == 0 || self.s == 0 || self.k == 0 || self.r == 0 {
            return bad("n, s, k, r must be positive".into());
        }
        let mut next = self.num_inputs();
        for (gi, g) in self.gates.iter().enumerate() {
            if g.output != next {
                return bad(format!("gate {gi} defines wire {} but {next} is next", g.output));
            }
            if g.inputs.len() > self.nu {
                return bad(format!("gate {gi} has fan-in {} > nu = {}", g.inputs.len(), self.nu));
            }
            if let Some(&w) = g.inputs.iter().find(|&&w| w >= next) {
                return bad(format!("gate {gi} reads undefined wire {w}"));
            }
            if g.table.len() != 1 << g.inputs.len() || g.table.iter().any(|&b| b > 1) {
                return bad(format!("gate {gi} truth table must have 2^fan-in bits"));
            }
            next += 1;
        }
        let outs = self.output_wires();
        if outs.len() != self.s * self.r {
            return bad(format!("expected {} output wires, got {}", self.s * self.r, outs.len()));
        }
        if let Some(&w) = outs.iter().find(|&&w| w >= next) {
            return bad(format!("output wire {w} is undefined"));
        }
        let depth = self.computed_depth();
        if depth > self.depth {
            return bad(format!("circuit depth {depth} exceeds declared {}", self.depth));
        }
        Ok(())
    }

    /// Longest gate path from an input to any wire.
    pub fn computed_depth(&self) -> usize {
        let base = self.num_inputs();
        let mut depth = vec![0usize; self.gates.len()];
        for (gi, g) in self.gates.iter().enumerate() {
            depth[gi] = 1 + g
                .inputs
                .iter()
                .filter(|&&w| w >= base)
                .map(|&w| depth[w - base])
                .max()
                .unwrap_or(0);
        }
        depth.into_iter().max().unwrap_or(0)
    }

    /// Output bits for the given input bits.
    pub fn evaluate(&self, inputs: &[bool]) -> Result<Vec<bool>> {
        if inputs.len() != self.num_inputs() {
            return Err(Error::LengthMismatch {
                what: "circuit input bits",
                expected: self.num_inputs(),
                got: inputs.len(),
            });
        }
        let mut wires = inputs.to_vec();
        wires.reserve(self.gates.len());
        for g in &self.gates {
            let idx = g
                .inputs
                .iter()
                .enumerate()
                .fold(0usize, |acc, (i, &w)| acc | (usize::from(wires[w]) << i));
            wires.push(g.table[idx] == 1);
        }
        Ok(self.output_wires().iter().map(|&w| wires[w]).collect())
    }

    /// `L←(o)` for every output block, as sorted input-block lists.
    pub fn backward_lightcones(&self) -> Vec<Vec<usize>> {
        let mut wire_blocks: Vec<Vec<usize>> = (0..self.num_inputs()).map(|b| vec![b / self.k]).collect();
        for g in &self.gates {
            let mut set: Vec<usize> = g.inputs.iter().flat_map(|&w| wire_blocks[w].iter().copied()).collect();
            set.sort_unstable();
            set.dedup();
            wire_blocks.push(set);
        }
        self.output_wires()
            .chunks(self.r)
            .map(|ws| {
                let set: BTreeSet<usize> = ws.iter().flat_map(|&w| wire_blocks[w].iter().copied()).collect();
                set.into_iter().collect()
            })
            .collect()
    }

    /// `L→(j)` for every input block, derived from the backward lightcones.
    pub fn forward_lightcones(&self) -> Vec<Vec<usize>> {
        transpose(&self.backward_lightcones(), self.n)
    }

    pub fn backward_lightcone(&self, o: usize) -> Result<Vec<usize>> {
        if o >= self.s {
            return Err(Error::IndexOutOfRange {
                what: "output block",
                index: o,
                len: self.s,
            });
        }
        Ok(self.backward_lightcones().swap_remove(o))
    }

    pub fn forward_lightcone(&self, j: usize) -> Result<Vec<usize>> {
        if j >= self.n {
            return Err(Error::IndexOutOfRange {
                what: "input block",
                index: j,
                len: self.n,
            });
        }
        Ok(self.forward_lightcones().swap_remove(j))
    }

    /// `ℓ = max_o |L←(o)|`.
    pub fn locality(&self) -> usize {
        self.backward_lightcones().iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn report(&self, window: Window) -> LightconeReport {
        let backward = self.backward_lightcones();
        let forward = transpose(&backward, self.n);
        let locality = backward.iter().map(Vec::len).max().unwrap_or(0);
        let l = window.length(self.n, locality);
        let good = good_set(&forward, l);
        let goods: BTreeSet<usize> = good.iter().copied().collect();
        let bad = (0..self.n).filter(|j| !goods.contains(j)).collect();
        let limited = limited_signaling_set(&forward, locality);
        let upper = |j: &&usize| **j >= self.n / 2;
        let limited_upper: BTreeSet<usize> = limited.iter().filter(upper).copied().collect();
        LightconeReport {
            n: self.n,
            s: self.s,
            locality,
            window,
            l,
            good_upper: good.iter().filter(upper).count(),
            limited_signaling_upper: limited_upper.len(),
            both_upper: good.iter().filter(upper).filter(|j| limited_upper.contains(j)).count(),
            forward,
            backward,
            good,
            bad,
            limited_signaling: limited,
        }
    }
}

fn transpose(cones: &[Vec<usize>], len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); len];
    for (o, cone) in cones.iter().enumerate() {
        for &j in cone {
            out[j].push(o);
        }
    }
    out
}

/// Input blocks whose forward lightcone misses output blocks `0..l`.
pub fn good_set(forward: &[Vec<usize>], l: usize) -> Vec<usize> {
    (0..forward.len())
        .filter(|&j| forward[j].iter().all(|&o| o >= l))
        .collect()
}

/// Input blocks influencing at most `8ℓ` output blocks.
pub fn limited_signaling_set(forward: &[Vec<usize>], ell: usize) -> Vec<usize> {
    (0..forward.len()).filter(|&j| forward[j].len() <= 8 * ell).collect()
}

/// Pick `(L, m, J)` for embedding into a `Telep_n` simulator.
///
/// `L = ⌊n/(8ℓ)⌋`; `m` is the smallest index above `n/2` that is `L`-good
/// and has limited signaling; `J = L→(m)`.
pub fn select_embedding_params(c: &BlockCircuit) -> Result<EmbeddingParams> {
    if c.k != TELEP_K || c.r != TELEP_R || c.n != c.s {
        return Err(Error::InvalidInput(format!(
            "expected a telep simulator shape (k=5, r=2, n=s), got k={}, r={}, n={}, s={}",
            c.k, c.r, c.n, c.s
        )));
    }
    let backward = c.backward_lightcones();
    let ell = backward.iter().map(Vec::len).max().unwrap_or(0).max(1);
    let forward = transpose(&backward, c.n);
    let n = c.n;
    let l = Window::Embedding.length(n, ell);
    if l == 0 {
        return Err(Error::NoValidIndex(format!("window L = ⌊{n}/(8·{ell})⌋ is empty")));
    }
    let m = (n / 2 + 1..n)
        .find(|&m| forward[m].iter().all(|&o| o >= l) && forward[m].len() <= 8 * ell)
        .ok_or_else(|| Error::NoValidIndex(format!("no L-good limited-signaling index above n/2 (n={n}, ℓ={ell})")))?;
    EmbeddingParams::new(n, l, m, forward[m].clone())
}

/// A block circuit read as a `Telep_n` simulator: input block `j` holds the
/// 5-bit code of `C_j`, output block `j` the 2-bit code of `P_j`, LSB first.
impl TelepOracle for BlockCircuit {
    fn name(&self) -> String {
        format!("circuit(n={}, depth={})", self.n, self.depth)
    }

    fn query(&self, inst: &TelepInstance) -> Result<TelepOutcome> {
        if self.k != TELEP_K || self.r != TELEP_R || self.n != inst.n() || self.s != inst.n() {
            return Err(Error::LengthMismatch {
                what: "circuit oracle instance",
                expected: self.n,
                got: inst.n(),
            });
        }
        let bits: Vec<bool> = inst
            .codes()
            .flat_map(|c| (0..TELEP_K).map(move |i| (c >> i) & 1 == 1))
            .collect();
        let out = self.evaluate(&bits)?;
        let paulis = out
            .chunks(TELEP_R)
            .map(|b| PauliLabel::from_code(u8::from(b[0]) | (u8::from(b[1]) << 1)))
            .collect::<Result<Vec<_>>>()?;
        Ok(TelepOutcome::new(paulis))
    }
}

/// Output block `j` copies the first `r` bits of input block `j`.
pub fn wire_identity(n: usize, k: usize, r: usize) -> BlockCircuit {
    assert!(r <= k, "wire identity needs r <= k");
    let gates = (0..n * r)
        .map(|i| Gate {
            inputs: vec![(i / r) * k + i % r],
            output: n * k + i,
            table: vec![0, 1],
        })
        .collect();
    BlockCircuit {
        nu: 1,
        depth: 1,
        k,
        r,
        n,
        s: n,
        gates,
        outputs: None,
    }
}

/// Complete `ν`-ary XOR tree of depth `d` over `ν^d` single-bit blocks.
pub fn fan_in_tree(nu: usize, depth: usize) -> BlockCircuit {
    let n = nu.pow(depth as u32);
    let mut layer: Vec<usize> = (0..n).collect();
    let mut gates = Vec::new();
    let mut next = n;
    let xor_table: Vec<u8> = (0..1usize << nu).map(|i| (i.count_ones() % 2) as u8).collect();
    for _ in 0..depth {
        layer = layer
            .chunks(nu)
            .map(|ins| {
                gates.push(Gate {
                    inputs: ins.to_vec(),
                    output: next,
                    table: xor_table.clone(),
                });
                next += 1;
                next - 1
            })
            .collect();
    }
    BlockCircuit {
        nu,
        depth,
        k: 1,
        r: 1,
        n,
        s: 1,
        gates,
        outputs: None,
    }
}

/// Knobs for [`random_local`].
#[derive(Debug, Clone, Copy)]
pub struct LocalCircuitSpec {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    /// Upper bound on every backward lightcone.
    pub ell: usize,
    /// Number of high fan-out input blocks.
    pub hubs: usize,
    pub seed: u64,
}

/// Random `n → n` block circuit of fan-in 2 whose every output block reads at
/// most `ell` input blocks. A few hub blocks are read by about half of all
/// outputs, so forward lightcones are far from uniform.
pub fn random_local(spec: LocalCircuitSpec) -> BlockCircuit {
    let LocalCircuitSpec {
        n,
        k,
        r,
        ell,
        hubs,
        seed,
    } = spec;
    assert!(ell >= 1 && ell <= n, "need 1 <= ell <= n");
    let mut rng = StableHasher::new(seed).word(7).rng();
    let hub_blocks: Vec<usize> = sample(&mut rng, n, hubs.min(n)).into_vec();
    let mut gates: Vec<Gate> = Vec::new();
    let mut next = n * k;
    let mut outputs = Vec::with_capacity(n * r);
    let mut max_depth = 0;
    for _ in 0..n {
        let size = rng.random_range(1..=ell);
        let mut blocks: BTreeSet<usize> = BTreeSet::new();
        if !hub_blocks.is_empty() && rng.random_bool(0.5) {
            blocks.insert(hub_blocks[rng.random_range(0..hub_blocks.len())]);
        }
        while blocks.len() < size {
            blocks.insert(rng.random_range(0..n));
        }
        for _ in 0..r {
            let mut layer: Vec<usize> = blocks.iter().map(|&b| b * k + rng.random_range(0..k)).collect();
            let mut depth = 0;
            loop {
                // a single leaf still gets one gate so outputs are gate wires
                if layer.len() == 1 && depth > 0 {
                    break;
                }
                layer = layer
                    .chunks(2)
                    .map(|ins| {
                        let table = (0..1 << ins.len()).map(|_| rng.random_range(0..2u8)).collect();
                        gates.push(Gate {
                            inputs: ins.to_vec(),
                            output: next,
                            table,
                        });
                        next += 1;
                        next - 1
                    })
                    .collect();
                depth += 1;
            }
            max_depth = max_depth.max(depth);
            outputs.push(layer[0]);
        }
    }
    BlockCircuit {
        nu: 2,
        depth: max_depth,
        k,
        r,
        n,
        s: n,
        gates,
        outputs: Some(outputs),
    }
}

/// Input blocks that semantically influence each output block, by flipping
/// every input bit on every assignment. Exponential; for tiny circuits only.
pub fn semantic_backward_lightcones(c: &BlockCircuit) -> Result<Vec<Vec<usize>>> {
    let bits = c.num_inputs();
    if bits > 12 {
        return Err(Error::SizeLimit {
            what: "semantic influence input bits",
            size: bits,
            limit: 12,
        });
    }
    let mut influence = vec![BTreeSet::new(); c.s];
    for x in 0..1usize << bits {
        let input: Vec<bool> = (0..bits).map(|i| (x >> i) & 1 == 1).collect();
        let base = c.evaluate(&input)?;
        for i in 0..bits {
            let mut flipped = input.clone();
            flipped[i] = !flipped[i];
            let out = c.evaluate(&flipped)?;
            for (o, chunk) in out.chunks(c.r).enumerate() {
                if chunk != &base[o * c.r..(o + 1) * c.r] {
                    influence[o].insert(i / c.k);
                }
            }
        }
    }
    Ok(influence.into_iter().map(|s| s.into_iter().collect()).collect())
}
