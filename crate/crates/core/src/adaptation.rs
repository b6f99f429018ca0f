use std::fmt;

use serde::{Deserialize, Serialize};

/// Architecture switches layered on top of plain forward message passing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdaptationSet {
    /// Nodes also aggregate, separately, messages from their out-neighbors.
    pub reverse_mp: bool,
    /// Messages carry the incoming port at their destination.
    pub in_ports: bool,
    /// Messages carry the outgoing port at their source.
    pub out_ports: bool,
    /// The initial embedding carries a bit marking one center node.
    pub ego_ids: bool,
}

impl AdaptationSet {
    pub const NONE: Self =
        Self { reverse_mp: false, in_ports: false, out_ports: false, ego_ids: false };

    pub fn reverse() -> Self {
        Self { reverse_mp: true, ..Self::NONE }
    }

    pub fn with_reverse(mut self) -> Self {
        self.reverse_mp = true;
        self
    }

    pub fn with_in_ports(mut self) -> Self {
        self.in_ports = true;
        self
    }

    pub fn with_out_ports(mut self) -> Self {
        self.out_ports = true;
        self
    }

    pub fn with_ports(self) -> Self {
        self.with_in_ports().with_out_ports()
    }

    pub fn with_ego(mut self) -> Self {
        self.ego_ids = true;
        self
    }

    pub fn uses_ports(&self) -> bool {
        self.in_ports || self.out_ports
    }

    /// Every flag set here is also set in `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        (!self.reverse_mp || other.reverse_mp)
            && (!self.in_ports || other.in_ports)
            && (!self.out_ports || other.out_ports)
            && (!self.ego_ids || other.ego_ids)
    }

    /// All 16 flag combinations, in a fixed order.
    pub fn all() -> Vec<Self> {
        (0u8..16)
            .map(|m| Self {
                reverse_mp: m & 1 != 0,
                in_ports: m & 2 != 0,
                out_ports: m & 4 != 0,
                ego_ids: m & 8 != 0,
            })
            .collect()
    }
}

impl fmt::Display for AdaptationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.reverse_mp {
            parts.push("reverse");
        }
        match (self.in_ports, self.out_ports) {
            (true, true) => parts.push("ports"),
            (true, false) => parts.push("in-ports"),
            (false, true) => parts.push("out-ports"),
            _ => {}
        }
        if self.ego_ids {
            parts.push("ego");
        }
        if parts.is_empty() {
            f.write_str("forward")
        } else {
            f.write_str(&parts.join("+"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_names() {
        assert_eq!(AdaptationSet::NONE.to_string(), "forward");
        assert_eq!(AdaptationSet::reverse().with_ports().to_string(), "reverse+ports");
        assert_eq!(AdaptationSet::NONE.with_in_ports().with_ego().to_string(), "in-ports+ego");
    }

    #[test]
    fn subset_order() {
        let all = AdaptationSet::all();
        assert_eq!(all.len(), 16);
        assert!(AdaptationSet::NONE.is_subset_of(&all[15]));
        assert!(!AdaptationSet::reverse().is_subset_of(&AdaptationSet::NONE.with_ego()));
    }
}
