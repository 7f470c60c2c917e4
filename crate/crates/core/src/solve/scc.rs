//! Tarjan's strongly connected components, iterative.

use alloc::vec;
use alloc::vec::Vec;

/// SCCs of the graph `succ`, in reverse topological order (sinks first).
pub fn tarjan_scc(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    let mut next = 0usize;
    // (node, next child position)
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos == 0 && index[v] == usize::MAX {
                index[v] = next;
                low[v] = next;
                next += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = succ[v].get(*pos) {
                *pos += 1;
                if index[w] == usize::MAX {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(u, _)) = call.last() {
                low[u] = low[u].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out
}

/// SCCs with no edge leaving them, restricted to nodes reachable from `from`.
pub fn bottom_sccs(succ: &[Vec<usize>], from: &[usize]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut reach = vec![false; n];
    let mut todo: Vec<usize> = from.to_vec();
    while let Some(v) = todo.pop() {
        if reach[v] {
            continue;
        }
        reach[v] = true;
        todo.extend(succ[v].iter().copied());
    }
    let mut comp_of = vec![usize::MAX; n];
    let comps = tarjan_scc(succ);
    for (c, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = c;
        }
    }
    comps
        .iter()
        .enumerate()
        .filter(|(c, comp)| {
            reach[comp[0]]
                && comp
                    .iter()
                    .all(|&v| succ[v].iter().all(|&w| comp_of[w] == *c))
        })
        .map(|(_, comp)| comp.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_and_bottoms() {
        // 0 <-> 1 -> 2 <-> 3, 4 -> 4
        let succ = vec![vec![1], vec![0, 2], vec![3], vec![2], vec![4]];
        let mut comps = tarjan_scc(&succ);
        comps.sort();
        assert_eq!(comps, vec![vec![0, 1], vec![2, 3], vec![4]]);
        assert_eq!(bottom_sccs(&succ, &[0]), vec![vec![2, 3]]);
        assert_eq!(bottom_sccs(&succ, &[4, 0]).len(), 2);
    }

    #[test]
    fn long_chain_does_not_recurse() {
        let n = 100_000;
        let succ: Vec<Vec<usize>> = (0..n).map(|v| vec![(v + 1) % n]).collect();
        assert_eq!(tarjan_scc(&succ).len(), 1);
    }
}
