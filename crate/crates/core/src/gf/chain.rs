//! Simultaneous powering `x -> [x^e1, ..., x^em]` by a vector addition chain
//! built with the Bos–Coster rule: repeatedly rewrite the largest pending
//! exponent in terms of the next largest.
//!
//! The plan is computed on the exponents alone, so its multiplication count
//! is known before any field arithmetic. If the chain would cost more than
//! independent square-and-multiply, the plan falls back to that.

use std::collections::{BinaryHeap, HashMap};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Step {
    One,
    /// x^e by square-and-multiply from the base.
    Direct(u128),
    /// node^k, times another node if present.
    PowMul {
        src: usize,
        k: u128,
        rest: Option<usize>,
    },
}

/// Multiplications (squarings included) used by plain square-and-multiply.
pub fn naive_cost(e: u128) -> u64 {
    if e == 0 {
        return 0;
    }
    let bits = 128 - e.leading_zeros() as u64;
    (bits - 1) + (e.count_ones() as u64 - 1)
}

/// Total naive cost of computing every exponent independently.
pub fn naive_mult_count(exps: &[u128]) -> u64 {
    exps.iter().map(|&e| naive_cost(e)).sum()
}

#[derive(Clone, Debug)]
pub struct ChainPlan {
    /// Steps in evaluation order; each refers only to earlier steps.
    steps: Vec<Step>,
    /// Index into `steps` for each requested exponent.
    targets: Vec<usize>,
    cost: u64,
}

impl ChainPlan {
    pub fn new(exps: &[u128]) -> Self {
        let chain = Self::bos_coster(exps);
        if chain.cost <= naive_mult_count(exps) {
            chain
        } else {
            Self::independent(exps)
        }
    }

    fn independent(exps: &[u128]) -> Self {
        let steps: Vec<Step> = exps
            .iter()
            .map(|&e| if e == 0 { Step::One } else { Step::Direct(e) })
            .collect();
        ChainPlan {
            targets: (0..exps.len()).collect(),
            cost: naive_mult_count(exps),
            steps,
        }
    }

    fn bos_coster(exps: &[u128]) -> Self {
        // node ids in creation order; ops recorded when a node is popped
        let mut node_exp: Vec<u128> = Vec::new();
        let mut live: HashMap<u128, usize> = HashMap::new();
        let mut heap: BinaryHeap<(u128, usize)> = BinaryHeap::new();
        let intern = |e: u128,
                      node_exp: &mut Vec<u128>,
                      live: &mut HashMap<u128, usize>,
                      heap: &mut BinaryHeap<(u128, usize)>| {
            *live.entry(e).or_insert_with(|| {
                node_exp.push(e);
                heap.push((e, node_exp.len() - 1));
                node_exp.len() - 1
            })
        };
        let target_nodes: Vec<usize> = exps
            .iter()
            .map(|&e| intern(e, &mut node_exp, &mut live, &mut heap))
            .collect();

        let mut popped: Vec<(usize, Step)> = Vec::new();
        let mut cost = 0u64;
        while let Some((v1, n1)) = heap.pop() {
            live.remove(&v1);
            if v1 == 0 {
                popped.push((n1, Step::One));
                continue;
            }
            let direct = naive_cost(v1);
            let step = match heap.peek().copied() {
                Some((v2, n2)) if v2 > 0 => {
                    let k = v1 / v2;
                    let r = v1 % v2;
                    let via = naive_cost(k) + u64::from(r > 0);
                    // a new remainder node costs at most its own naive cost
                    let r_new = r > 0 && !live.contains_key(&r);
                    let r_cost = if r_new { naive_cost(r) } else { 0 };
                    if via + r_cost <= direct {
                        cost += via;
                        let rest = (r > 0).then(|| intern(r, &mut node_exp, &mut live, &mut heap));
                        Step::PowMul { src: n2, k, rest }
                    } else {
                        cost += direct;
                        Step::Direct(v1)
                    }
                }
                _ => {
                    cost += direct;
                    Step::Direct(v1)
                }
            };
            popped.push((n1, step));
        }

        // reverse pop order is a valid evaluation order
        let mut order = vec![usize::MAX; node_exp.len()];
        let mut steps = Vec::with_capacity(popped.len());
        for (pos, (node, _)) in popped.iter().rev().enumerate() {
            order[*node] = pos;
        }
        for (_, step) in popped.into_iter().rev() {
            steps.push(match step {
                Step::PowMul { src, k, rest } => Step::PowMul {
                    src: order[src],
                    k,
                    rest: rest.map(|r| order[r]),
                },
                s => s,
            });
        }
        ChainPlan {
            targets: target_nodes.into_iter().map(|n| order[n]).collect(),
            steps,
            cost,
        }
    }

    /// Multiplications the plan performs.
    pub fn mult_count(&self) -> u64 {
        self.cost
    }

    /// Runs the plan; returns the powers and the multiplications performed.
    pub fn evaluate<T: Clone>(&self, x: &T, one: T, mul: impl Fn(&T, &T) -> T) -> (Vec<T>, u64) {
        let mut count = 0u64;
        let pow = |base: &T, e: u128, count: &mut u64| -> T {
            // e >= 1
            let mut acc: Option<T> = None;
            let mut b = base.clone();
            let mut e = e;
            loop {
                if e & 1 == 1 {
                    acc = Some(match acc {
                        None => b.clone(),
                        Some(a) => {
                            *count += 1;
                            mul(&a, &b)
                        }
                    });
                }
                e >>= 1;
                if e == 0 {
                    break;
                }
                *count += 1;
                b = mul(&b, &b);
            }
            acc.expect("exponent is positive")
        };
        let mut vals: Vec<T> = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            let v = match step {
                Step::One => one.clone(),
                Step::Direct(e) => pow(x, *e, &mut count),
                Step::PowMul { src, k, rest } => {
                    let p = pow(&vals[*src], *k, &mut count);
                    match rest {
                        Some(r) => {
                            count += 1;
                            mul(&p, &vals[*r])
                        }
                        None => p,
                    }
                }
            };
            vals.push(v);
        }
        (
            self.targets.iter().map(|&i| vals[i].clone()).collect(),
            count,
        )
    }
}

/// `[x^e for e in exps]`.
pub fn batch_pow<T: Clone>(x: &T, exps: &[u128], one: T, mul: impl Fn(&T, &T) -> T) -> Vec<T> {
    ChainPlan::new(exps).evaluate(x, one, mul).0
}
