//! Zhang–Shasha ordered tree edit distance.

use super::costs::CostConfig;
use super::tree::Tree;

/// Postorder view of a tree: nodes, leftmost-leaf descendants, key roots.
struct Indexed<'a> {
    nodes: Vec<&'a Tree>,
    lml: Vec<usize>,
    keyroots: Vec<usize>,
}

impl<'a> Indexed<'a> {
    fn new(root: &'a Tree) -> Self {
        let mut nodes = Vec::new();
        let mut lml = Vec::new();
        fn walk<'a>(t: &'a Tree, nodes: &mut Vec<&'a Tree>, lml: &mut Vec<usize>) -> usize {
            let mut leftmost = None;
            for c in &t.children {
                let l = walk(c, nodes, lml);
                leftmost.get_or_insert(l);
            }
            let me = nodes.len();
            nodes.push(t);
            let l = leftmost.unwrap_or(me);
            lml.push(l);
            l
        }
        walk(root, &mut nodes, &mut lml);
        // A key root is the highest node with a given leftmost leaf.
        let n = nodes.len();
        let mut seen = vec![false; n];
        let mut keyroots = Vec::new();
        for i in (0..n).rev() {
            if !seen[lml[i]] {
                seen[lml[i]] = true;
                keyroots.push(i);
            }
        }
        keyroots.sort_unstable();
        Indexed { nodes, lml, keyroots }
    }
}

/// Minimum total cost of node insertions, deletions and relabelings turning
/// `a` into `b`.
pub fn tree_distance(a: &Tree, b: &Tree, costs: &CostConfig) -> f64 {
    let ta = Indexed::new(a);
    let tb = Indexed::new(b);
    let (n, m) = (ta.nodes.len(), tb.nodes.len());
    let mut td = vec![vec![0.0f64; m]; n];
    let mut fd = vec![vec![0.0f64; m + 1]; n + 1];

    for &i in &ta.keyroots {
        for &j in &tb.keyroots {
            let (li, lj) = (ta.lml[i], tb.lml[j]);
            // fd[x][y] over forests ta[li..li+x) and tb[lj..lj+y).
            fd[0][0] = 0.0;
            for x in 1..=i - li + 1 {
                fd[x][0] = fd[x - 1][0] + costs.delete(ta.nodes[li + x - 1]);
            }
            for y in 1..=j - lj + 1 {
                fd[0][y] = fd[0][y - 1] + costs.insert(tb.nodes[lj + y - 1]);
            }
            for x in 1..=i - li + 1 {
                let ni = li + x - 1;
                for y in 1..=j - lj + 1 {
                    let nj = lj + y - 1;
                    let del = fd[x - 1][y] + costs.delete(ta.nodes[ni]);
                    let ins = fd[x][y - 1] + costs.insert(tb.nodes[nj]);
                    if ta.lml[ni] == li && tb.lml[nj] == lj {
                        let rel = fd[x - 1][y - 1] + costs.relabel(ta.nodes[ni], tb.nodes[nj]);
                        let best = del.min(ins).min(rel);
                        fd[x][y] = best;
                        td[ni][nj] = best;
                    } else {
                        let px = ta.lml[ni] - li;
                        let py = tb.lml[nj] - lj;
                        let sub = fd[px][py] + td[ni][nj];
                        fd[x][y] = del.min(ins).min(sub);
                    }
                }
            }
        }
    }
    td[n - 1][m - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ted::tree::NodeClass::*;

    fn t(label: &str, children: Vec<Tree>) -> Tree {
        Tree::node(Column, label, children)
    }

    #[test]
    fn classic_example() {
        // f(d(a, c(b)), e) vs f(c(d(a, b)), e): distance 2 with unit costs.
        let unit = CostConfig {
            column: crate::ted::ClassCost::uniform(1.0),
            ..CostConfig::default()
        };
        let a = t(
            "f",
            vec![
                t("d", vec![t("a", vec![]), t("c", vec![t("b", vec![])])]),
                t("e", vec![]),
            ],
        );
        let b = t(
            "f",
            vec![
                t("c", vec![t("d", vec![t("a", vec![]), t("b", vec![])])]),
                t("e", vec![]),
            ],
        );
        assert_eq!(tree_distance(&a, &b, &unit), 2.0);
        assert_eq!(tree_distance(&a, &a, &unit), 0.0);
    }

    #[test]
    fn single_nodes() {
        let c = CostConfig::default();
        let x = Tree::leaf(Table, "x");
        let y = Tree::leaf(Column, "y");
        assert_eq!(tree_distance(&x, &y, &c), 3.0);
    }
}
