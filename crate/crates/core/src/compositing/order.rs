use super::layers::{Layer, LayerKind};

/// Depth keys closer than this count as tied.
pub const DEPTH_TIE: f64 = 0.02;

/// Back-to-front paint order for one frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramePlan {
    pub order: Vec<LayerKind>,
}

/// Order layers far to near.
///
/// Face and wisps are sorted by depth, descending. Runs of depths whose
/// neighbors differ by less than [`DEPTH_TIE`] form one group, inside which
/// lower layers (larger topmost row) paint first; the face paints before
/// wisps and wisps by index on a full tie. The background is always first.
pub fn sort_layers(face: &Layer, wisps: &[Layer]) -> FramePlan {
    let mut items: Vec<&Layer> = std::iter::once(face).chain(wisps).collect();
    let rank = |k: LayerKind| match k {
        LayerKind::Background => 0,
        LayerKind::Face => 1,
        LayerKind::Wisp(i) => 2 + i,
    };
    items.sort_by(|a, b| b.depth.total_cmp(&a.depth).then(rank(a.kind).cmp(&rank(b.kind))));
    let mut group = vec![0usize; items.len()];
    for i in 1..items.len() {
        let tied = (items[i - 1].depth - items[i].depth).abs() < DEPTH_TIE;
        group[i] = group[i - 1] + usize::from(!tied);
    }
    let mut keyed: Vec<(usize, &Layer)> = group.into_iter().zip(items).collect();
    keyed.sort_by(|(ga, a), (gb, b)| {
        ga.cmp(gb)
            .then(b.height.total_cmp(&a.height))
            .then(rank(a.kind).cmp(&rank(b.kind)))
    });
    FramePlan {
        order: std::iter::once(LayerKind::Background)
            .chain(keyed.into_iter().map(|(_, l)| l.kind))
            .collect(),
    }
}

impl FramePlan {
    /// Background first, one face, each of `wisps` wisps exactly once.
    pub fn is_well_formed(&self, wisps: usize) -> bool {
        let mut sorted = self.order.clone();
        sorted.sort();
        let expected: Vec<LayerKind> = [LayerKind::Background, LayerKind::Face]
            .into_iter()
            .chain((0..wisps).map(LayerKind::Wisp))
            .collect();
        self.order.first() == Some(&LayerKind::Background) && sorted == expected
    }
}
