use graph_core::{Arborescence, Arc};

/// Depth-first walk of the tree from the root, edge orientations ignored,
/// children visited in ascending vertex id. Returns the walk `r` (each tree
/// edge once per direction, 2(|V|-1) arcs, starting and ending at the root)
/// and its inverse (the reversed walk with every arc flipped).
pub fn dfs_traversal(t: &Arborescence) -> (Vec<Arc>, Vec<Arc>) {
    let children = t.children_sorted();
    let mut r = Vec::new();
    // Stack entries: (vertex, next child position to expand).
    let mut stack = vec![(t.root(), 0usize)];
    while let Some(&mut (v, ref mut next)) = stack.last_mut() {
        let kids = &children[v.index()];
        if *next < kids.len() {
            let c = kids[*next];
            *next += 1;
            r.push(t.out_arc(c).expect("child has an out-arc").reversed());
            stack.push((c, 0));
        } else {
            stack.pop();
            if let Some(arc) = t.out_arc(v) {
                r.push(arc);
            }
        }
    }
    let rinv = r.iter().rev().map(|a| a.reversed()).collect();
    (r, rinv)
}
