//! Designs shipped with the crate: post lattices for the mode and tuning
//! solvers, and bit grids for the programmable array.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::lattice::LatticeModel;
use crate::pca::PcaGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignKind {
    Lattice,
    Grid,
}

#[derive(Debug, Clone, Copy)]
pub struct Design {
    pub name: &'static str,
    pub kind: DesignKind,
    pub json: &'static str,
}

macro_rules! design {
    ($name:literal, $kind:ident) => {
        Design { name: $name, kind: DesignKind::$kind, json: include_str!(concat!("../designs/", $name, ".json")) }
    };
}

pub const DESIGNS: &[Design] = &[
    design!("pair", Lattice),
    design!("line3", Lattice),
    design!("d3_triangle", Lattice),
    design!("d4_square", Lattice),
    design!("d2_rectangle", Lattice),
    design!("d5_pentagon", Lattice),
    design!("d10_ring", Lattice),
    design!("d2_chain", Lattice),
    design!("register", Lattice),
    design!("interferometer", Grid),
    design!("two_channel", Grid),
    design!("coupler", Grid),
    design!("empty", Grid),
];

/// Post id → sub-lattice name for the register design.
pub const REGISTER_PARTITION: &str = include_str!("../designs/register_partition.json");

pub fn find(name: &str) -> Option<&'static Design> {
    DESIGNS.iter().find(|d| d.name == name)
}

pub fn lattice(name: &str) -> Option<LatticeModel> {
    find(name).filter(|d| d.kind == DesignKind::Lattice).map(|d| LatticeModel::from_json(d.json).expect("bundled lattice parses"))
}

pub fn grid(name: &str) -> Option<PcaGrid> {
    find(name).filter(|d| d.kind == DesignKind::Grid).map(|d| PcaGrid::from_json(d.json).expect("bundled grid parses"))
}

pub fn register_partition() -> BTreeMap<u32, String> {
    serde_json::from_str(REGISTER_PARTITION).expect("bundled partition parses")
}

#[derive(Serialize)]
struct Entry<'a> {
    name: &'a str,
    kind: DesignKind,
    design: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    partition: Option<serde_json::Value>,
}

/// Catalogue served at `/api/examples`.
pub fn catalogue_json() -> String {
    let entries: Vec<Entry> = DESIGNS
        .iter()
        .map(|d| Entry {
            name: d.name,
            kind: d.kind,
            design: serde_json::from_str(d.json).expect("bundled design parses"),
            partition: (d.name == "register").then(|| serde_json::from_str(REGISTER_PARTITION).expect("partition parses")),
        })
        .collect();
    serde_json::to_string(&entries).expect("catalogue serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pca::compile_grid;

    #[test]
    fn every_design_loads_and_validates() {
        for d in DESIGNS {
            match d.kind {
                DesignKind::Lattice => lattice(d.name).unwrap().validate().unwrap(),
                DesignKind::Grid => {
                    compile_grid(&grid(d.name).unwrap()).unwrap();
                }
            }
        }
    }

    #[test]
    fn partition_covers_the_register() {
        let m = lattice("register").unwrap();
        let p = register_partition();
        assert!(m.posts.iter().all(|q| p.contains_key(&q.id)));
        assert_eq!(p.values().filter(|g| *g == "bus").count(), 8);
    }
}
