//! Size caps. Every potentially explosive search takes a [`Caps`] and fails
//! with a cap error instead of running away.

/// Limits for enumeration-heavy operations. All fields are inclusive bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest ring (element count) that may be constructed or analysed.
    pub ring_order: usize,
    /// Largest poset (element count); the relation is stored in 64-bit rows.
    pub poset_points: usize,
    /// Largest source/target size for monotone map enumeration.
    pub map_poset_points: usize,
    /// Largest generator count for a tensor presentation (|A| * |B|).
    pub tensor_generators: usize,
    /// Work budget for hom-poset and lax transformation enumeration.
    pub hom_budget: usize,
    /// Work budget for counting presentation homomorphisms into a group.
    pub group_hom_budget: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            ring_order: 16,
            poset_points: 64,
            map_poset_points: 9,
            tensor_generators: 64,
            hom_budget: 400_000,
            group_hom_budget: 4_000_000,
        }
    }
}

impl Caps {
    /// Caps loose enough for targeted checks on medium rings: chart
    /// products reach 36 elements, and flatness probes tensor a 6-element
    /// module with such a product (216 generators).
    pub fn roomy() -> Self {
        Caps {
            ring_order: 64,
            tensor_generators: 216,
            ..Caps::default()
        }
    }
}
