use std::collections::BTreeSet;

use graph_core::{Arc, EdgeId, MultiGraph, VertexId};

use crate::{ForwardAction, Header, LocalView, SchemeError};

/// Per-vertex cyclic port orders: a packet received over a port leaves on
/// the next active port of the cycle. Origin overrides name the port tried
/// first for locally originated packets (default: the first of the cycle).
#[derive(Clone, Debug)]
pub struct VertexCircular {
    orders: Vec<Vec<EdgeId>>,
    origin: Vec<Option<EdgeId>>,
}

impl VertexCircular {
    pub fn new(
        g: &MultiGraph,
        orders: Vec<Vec<EdgeId>>,
        origin: Vec<Option<EdgeId>>,
    ) -> Result<Self, SchemeError> {
        for v in g.vertices() {
            let mut given: Vec<_> = orders[v.index()].clone();
            given.sort_unstable();
            let mut incident: Vec<_> = g.incident(v).to_vec();
            incident.sort_unstable();
            if given != incident {
                return Err(SchemeError::BadPortOrder(g.label(v).to_string()));
            }
            if let Some(e) = origin[v.index()] {
                if !g.is_endpoint(e, v) {
                    return Err(SchemeError::BadPortOrder(g.label(v).to_string()));
                }
            }
        }
        Ok(VertexCircular { orders, origin })
    }

    pub fn order(&self, v: VertexId) -> &[EdgeId] {
        &self.orders[v.index()]
    }
}

pub fn vertex_circular_decide(
    c: &VertexCircular,
    view: &LocalView,
) -> Result<ForwardAction, SchemeError> {
    let v = view.vertex;
    if v == view.g.destination() {
        return Ok(ForwardAction::Deliver);
    }
    let order = &c.orders[v.index()];
    let l = order.len();
    let first = match view.incoming {
        Some(a) => {
            let i = order
                .iter()
                .position(|&e| e == a.edge)
                .expect("incoming edge is incident");
            (i + 1) % l
        }
        None => {
            let e0 = c.origin[v.index()].unwrap_or(order[0]);
            order.iter().position(|&e| e == e0).expect("validated port")
        }
    };
    let mut failed = BTreeSet::new();
    for off in 0..l {
        let e = order[(first + off) % l];
        if view.is_active(e) {
            return Ok(ForwardAction::Forward {
                arc: Arc::new(e, v, view.g.other_end(e, v)),
                header: Header::default(),
            });
        }
        failed.insert(e);
    }
    Ok(ForwardAction::Drop {
        distinct_failures: failed.len(),
    })
}
