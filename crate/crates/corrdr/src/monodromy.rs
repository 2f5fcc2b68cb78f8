//! Graphs decorated with a torsion subgroup and a monodromy pairing.
//!
//! A monodromy graph is (Γ, K̃, φ): a subgroup K̃ of the ambient δ-torsion
//! together with a pairing φ : K̃ ⊗ H₁(Γ, Z_δ) → Z_δ, stored as a matrix
//! against the generator rows of K̃ and the fundamental cycle basis of Γ.
//! The left kernel of φ is the core; the right kernel 𝒯 collects the
//! divisor class vectors compatible with the decoration.
//!
//! Contraction transports φ through the H₁ identification: every new
//! fundamental cycle lifts to the old graph (surviving edges keep their
//! coefficients up to stored-orientation flips, the contracted edge takes
//! the unique flow-closing coefficient), and the lift's coordinates in the
//! old basis are its values on the old non-tree edges.

use std::collections::BTreeSet;

use crate::abelian::{enumerate_subgroups, Subgroup, TorsionAmbient};
use crate::error::Error;
use crate::graphs::{automorphisms, Graph};
use crate::tropical::{class_vectors, DivisorClass};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonodromyGraph {
    graph: Graph,
    ambient: TorsionAmbient,
    kernel: Subgroup,
    /// One row per generator row of `kernel`, one column per cycle.
    phi: Vec<Vec<i64>>,
}

fn reduce_row(row: &[i64], delta: i64) -> Vec<i64> {
    row.iter().map(|&x| x.rem_euclid(delta)).collect()
}

/// Σ λ_i · rows_i mod δ.
fn combine(rows: &[Vec<i64>], lambda: &[i64], width: usize, delta: i64) -> Vec<i64> {
    let mut out = vec![0i64; width];
    for (l, row) in lambda.iter().zip(rows) {
        for (o, &x) in out.iter_mut().zip(row) {
            *o = (*o + l * x).rem_euclid(delta);
        }
    }
    out
}

impl MonodromyGraph {
    pub fn new(
        graph: Graph,
        ambient: TorsionAmbient,
        kernel: Subgroup,
        phi: Vec<Vec<i64>>,
    ) -> Result<Self> {
        if kernel.delta() != ambient.delta || kernel.rank() != ambient.rank() {
            return Err(Error::config(
                "kernel subgroup does not live in the ambient torsion group",
            ));
        }
        let b1 = graph.b1();
        if phi.len() != kernel.rows().len() {
            return Err(Error::config(format!(
                "pairing needs one row per kernel generator ({} expected)",
                kernel.rows().len()
            )));
        }
        let delta = i64::from(ambient.delta);
        let phi: Vec<Vec<i64>> = phi
            .iter()
            .map(|row| {
                if row.len() != b1 {
                    return Err(Error::config(format!(
                        "pairing needs one column per cycle ({b1} expected)"
                    )));
                }
                Ok(reduce_row(row, delta))
            })
            .collect::<Result<_>>()?;
        let mg = MonodromyGraph {
            graph,
            ambient,
            kernel,
            phi,
        };
        if !mg.is_well_defined() {
            return Err(Error::config(
                "pairing does not respect the relations of the kernel generators",
            ));
        }
        Ok(mg)
    }

    /// φ factors through K̃ iff every coefficient vector combining the
    /// generators to zero also combines the pairing rows to zero.
    fn is_well_defined(&self) -> bool {
        let delta = i64::from(self.ambient.delta);
        let m = self.kernel.rows().len();
        let rank = self.ambient.rank();
        let b1 = self.graph.b1();
        for lambda in class_vectors(self.ambient.delta, m) {
            let elt = combine(self.kernel.rows(), &lambda, rank, delta);
            if elt.iter().all(|&x| x == 0) {
                let row = combine(&self.phi, &lambda, b1, delta);
                if row.iter().any(|&x| x != 0) {
                    return false;
                }
            }
        }
        true
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn ambient(&self) -> TorsionAmbient {
        self.ambient
    }

    pub fn kernel(&self) -> &Subgroup {
        &self.kernel
    }

    pub fn phi(&self) -> &[Vec<i64>] {
        &self.phi
    }

    /// The pairing row of the kernel element with generator coordinates λ.
    fn pairing_of(&self, lambda: &[i64]) -> Vec<i64> {
        combine(
            &self.phi,
            lambda,
            self.graph.b1(),
            i64::from(self.ambient.delta),
        )
    }

    /// Generator coordinates of an element of K̃, by closure search.
    fn coordinates_of(&self, elt: &[i64]) -> Option<Vec<i64>> {
        let delta = i64::from(self.ambient.delta);
        let rank = self.ambient.rank();
        class_vectors(self.ambient.delta, self.kernel.rows().len())
            .into_iter()
            .find(|lambda| combine(self.kernel.rows(), lambda, rank, delta) == elt)
    }

    /// The core: the left kernel of φ inside K̃.
    pub fn core(&self) -> Subgroup {
        let delta = i64::from(self.ambient.delta);
        let rank = self.ambient.rank();
        let mut gens = Vec::new();
        for lambda in class_vectors(self.ambient.delta, self.kernel.rows().len()) {
            if self.pairing_of(&lambda).iter().all(|&x| x == 0) {
                gens.push(combine(self.kernel.rows(), &lambda, rank, delta));
            }
        }
        Subgroup::new(self.ambient.delta, rank, &gens).expect("core generators are ambient vectors")
    }

    /// The right kernel 𝒯 ⊆ H₁(Γ, Z_δ): class vectors annihilated by every
    /// row of φ.
    pub fn right_kernel(&self) -> Subgroup {
        let delta = i64::from(self.ambient.delta);
        let b1 = self.graph.b1();
        let mut gens = Vec::new();
        for gamma in class_vectors(self.ambient.delta, b1) {
            let ok = self.phi.iter().all(|row| {
                row.iter()
                    .zip(&gamma)
                    .map(|(&a, &b)| a * b)
                    .sum::<i64>()
                    .rem_euclid(delta)
                    == 0
            });
            if ok {
                gens.push(gamma);
            }
        }
        Subgroup::new(self.ambient.delta, b1, &gens).expect("kernel vectors are cycle classes")
    }

    /// Contract base edge `e`. A loop restricts K̃ to the elements with
    /// trivial monodromy around it; a non-loop keeps K̃. Either way φ is
    /// transported through the cycle-basis identification. The core is
    /// preserved.
    pub fn contract(&self, e: usize) -> Result<MonodromyGraph> {
        let g = &self.graph;
        if e >= g.n_edges() {
            return Err(Error::config("edge index out of range"));
        }
        let delta = i64::from(self.ambient.delta);
        let (a, b) = g.edge(e);
        let is_loop = a == b;
        let contracted = g.contract_edge(e);

        let in_tree = g.spanning_tree();
        let old_nontree: Vec<usize> = (0..g.n_edges()).filter(|&f| !in_tree[f]).collect();

        // pairing rows of the new kernel's generators, in old cycle columns
        let (new_kernel, eff_rows): (Subgroup, Vec<Vec<i64>>) = if is_loop {
            let j0 = old_nontree
                .iter()
                .position(|&f| f == e)
                .expect("a loop is never a tree edge");
            let mut gens = Vec::new();
            for lambda in class_vectors(self.ambient.delta, self.kernel.rows().len()) {
                if self.pairing_of(&lambda)[j0] == 0 {
                    gens.push(combine(
                        self.kernel.rows(),
                        &lambda,
                        self.ambient.rank(),
                        delta,
                    ));
                }
            }
            let sub = Subgroup::new(self.ambient.delta, self.ambient.rank(), &gens)?;
            let rows = sub
                .rows()
                .iter()
                .map(|r| {
                    let lambda = self
                        .coordinates_of(r)
                        .expect("restricted kernel lies in the kernel");
                    self.pairing_of(&lambda)
                })
                .collect();
            (sub, rows)
        } else {
            (self.kernel.clone(), self.phi.clone())
        };

        // lift each new fundamental cycle and read its old coordinates
        let old_of = |i: usize| if i >= e { i + 1 } else { i };
        let reindex = |v: usize| {
            if is_loop {
                v
            } else if v == b {
                a
            } else if v > b {
                v - 1
            } else {
                v
            }
        };
        let new_basis = contracted.cycle_basis();
        let mut coords: Vec<Vec<i64>> = Vec::with_capacity(new_basis.len());
        for gamma in &new_basis {
            let mut lift = vec![0i64; g.n_edges()];
            for (i, &c) in gamma.iter().enumerate() {
                let old = old_of(i);
                let (x, y) = g.edge(old);
                let sign = if !is_loop && reindex(x) > reindex(y) {
                    -1
                } else {
                    1
                };
                lift[old] = sign * c;
            }
            // close the flow across the contracted edge
            let mut bound = vec![0i64; g.n_vertices()];
            for (f, &c) in lift.iter().enumerate() {
                if f == e || c == 0 {
                    continue;
                }
                let (t, h) = g.edge(f);
                bound[h] += c;
                bound[t] -= c;
            }
            if is_loop {
                assert!(bound.iter().all(|&x| x == 0), "lifted cycle must close");
            } else {
                lift[e] = -bound[b];
                bound[b] += lift[e];
                bound[a] -= lift[e];
                assert!(bound.iter().all(|&x| x == 0), "lifted cycle must close");
            }
            coords.push(old_nontree.iter().map(|&f| lift[f]).collect());
        }

        let new_phi: Vec<Vec<i64>> = eff_rows
            .iter()
            .map(|row| {
                coords
                    .iter()
                    .map(|c| {
                        row.iter()
                            .zip(c)
                            .map(|(&p, &x)| p * x)
                            .sum::<i64>()
                            .rem_euclid(delta)
                    })
                    .collect()
            })
            .collect();
        MonodromyGraph::new(contracted, self.ambient, new_kernel, new_phi)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "graph": self.graph.to_json(),
            "delta": self.ambient.delta,
            "q": self.ambient.q,
            "Ktilde": self.kernel.to_json(),
            "phi": self.phi,
        })
    }
}

/// A cone of the correlated fan: a monodromy graph plus a divisor class in
/// its right kernel.
#[derive(Debug, Clone)]
pub struct Corr0Cone {
    pub base: MonodromyGraph,
    pub class: DivisorClass,
}

/// Both stratum degrees of a monodromy graph: every δ-torsion root, and the
/// correlated locus with kernel K̃.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StratumDegrees {
    pub spin_all: u128,
    pub spin_corr0: u128,
}

pub fn stratum_degrees(mg: &MonodromyGraph) -> Result<StratumDegrees> {
    let delta = u128::from(mg.ambient().delta);
    let g = u128::from(mg.graph().total_genus());
    let b1 = mg.graph().b1() as u128;
    let exp_all = 2 * g - b1; // 2g − b₁ = 2Σg(v) + b₁ ≥ 0
    let spin_all = delta
        .checked_pow(exp_all as u32)
        .ok_or_else(|| Error::resource("stratum degree overflows"))?;
    // δ^{2g − b₁ − 2q}·|K̃| with a possibly negative exponent
    let twoq = 2 * mg.ambient().q as u128;
    let order = u128::from(mg.kernel().order());
    let spin_corr0 = if 2 * g >= b1 + twoq {
        let p = delta
            .checked_pow((2 * g - b1 - twoq) as u32)
            .ok_or_else(|| Error::resource("stratum degree overflows"))?;
        p.checked_mul(order)
            .ok_or_else(|| Error::resource("stratum degree overflows"))?
    } else {
        let div = delta
            .checked_pow((b1 + twoq - 2 * g) as u32)
            .ok_or_else(|| Error::resource("stratum degree overflows"))?;
        if order % div != 0 {
            return Err(Error::invariant(format!(
                "stratum degree {order}/δ^{} is not an integer",
                b1 + twoq - 2 * g
            )));
        }
        order / div
    };
    if spin_corr0 == 0 {
        return Err(Error::invariant("stratum degree must be positive"));
    }
    Ok(StratumDegrees {
        spin_all,
        spin_corr0,
    })
}

/// One cone per element of the right kernel.
pub fn enumerate_corr0_cones(mg: &MonodromyGraph) -> Vec<Corr0Cone> {
    let mut vectors = mg.right_kernel().elements();
    vectors.sort();
    vectors
        .into_iter()
        .map(|v| Corr0Cone {
            base: mg.clone(),
            class: DivisorClass::new(mg.graph().clone(), mg.ambient().delta, v)
                .expect("kernel vectors have one entry per cycle"),
        })
        .collect()
}

/// All monodromy structures on one graph with the prescribed core, both as
/// a labeled count and as representatives of Aut(Γ)-orbits (automorphisms
/// act on the pairing columns through the induced map on H₁).
#[derive(Debug, Clone)]
pub struct GraphStrata {
    pub labeled: u64,
    pub reps: Vec<MonodromyGraph>,
}

pub fn strata_for_graph(
    graph: &Graph,
    ambient: TorsionAmbient,
    core: &Subgroup,
    cap: usize,
) -> Result<GraphStrata> {
    if core.delta() != ambient.delta || core.rank() != ambient.rank() {
        return Err(Error::config(
            "core subgroup does not live in the ambient torsion group",
        ));
    }
    let delta = i64::from(ambient.delta);
    let b1 = graph.b1();

    // column actions of the automorphisms on H₁ coordinates
    let basis = graph.cycle_basis();
    let in_tree = graph.spanning_tree();
    let nontree: Vec<usize> = (0..graph.n_edges()).filter(|&f| !in_tree[f]).collect();
    let column_actions: Vec<Vec<Vec<i64>>> = automorphisms(graph)
        .iter()
        .map(|sigma| {
            basis
                .iter()
                .map(|gamma| {
                    let image = sigma.act_on_edge_vector(gamma);
                    nontree.iter().map(|&f| image[f]).collect::<Vec<i64>>()
                })
                .collect()
        })
        .collect();

    let mut labeled = 0u64;
    let mut seen: BTreeSet<(Subgroup, Vec<Vec<i64>>)> = BTreeSet::new();
    let mut reps = Vec::new();
    for ktilde in enumerate_subgroups(ambient.delta, ambient.rank(), cap)? {
        if !core.is_subgroup_of(&ktilde) {
            continue;
        }
        let m = ktilde.rows().len();
        let entries = m * b1;
        match (ambient.delta as u128).checked_pow(entries as u32) {
            Some(c) if c <= cap as u128 => {}
            _ => {
                return Err(Error::resource(format!(
                    "{}^{entries} pairing candidates exceed the cap {cap}",
                    ambient.delta
                )))
            }
        }
        for flat in class_vectors(ambient.delta, entries) {
            let phi: Vec<Vec<i64>> = if b1 == 0 {
                vec![vec![]; m]
            } else {
                flat.chunks(b1).map(|c| c.to_vec()).collect()
            };
            let Ok(mg) = MonodromyGraph::new(graph.clone(), ambient, ktilde.clone(), phi.clone())
            else {
                continue;
            };
            if mg.core() != *core {
                continue;
            }
            labeled += 1;
            // orbit representative: lexicographically least column image
            let canonical = column_actions
                .iter()
                .map(|action| {
                    phi.iter()
                        .map(|row| {
                            (0..b1)
                                .map(|i| {
                                    row.iter()
                                        .zip(&action[i])
                                        .map(|(&p, &x)| p * x)
                                        .sum::<i64>()
                                        .rem_euclid(delta)
                                })
                                .collect::<Vec<i64>>()
                        })
                        .collect::<Vec<Vec<i64>>>()
                })
                .min()
                .expect("identity automorphism always present");
            if seen.insert((ktilde.clone(), canonical.clone())) {
                reps.push(
                    MonodromyGraph::new(graph.clone(), ambient, ktilde.clone(), canonical)
                        .expect("orbit representative is a valid pairing"),
                );
            }
        }
    }
    Ok(GraphStrata { labeled, reps })
}

/// Monodromy strata over all stable graphs of the signature, one
/// representative per isomorphism class.
pub fn enumerate_strata(
    genus: u32,
    n_legs: usize,
    degree: u32,
    delta: u32,
    q: usize,
    core: &Subgroup,
    cap: usize,
) -> Result<Vec<MonodromyGraph>> {
    let ambient = TorsionAmbient::new(delta, q)?;
    let mut out = Vec::new();
    for graph in crate::graphs::enumerate_graphs(genus, n_legs, degree, cap)? {
        out.extend(strata_for_graph(&graph, ambient, core, cap)?.reps);
    }
    Ok(out)
}
