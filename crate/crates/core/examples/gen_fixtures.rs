//! Regenerates the bundled fixture files.
use linkring::cosetgraph::{product_graph, product_dihedral_gens};
use std::fs;

fn main() {
    let c5c7 = product_graph(5, 7).unwrap();
    fs::write("fixtures/c5c7.g", c5c7.format()).unwrap();
    let c5c5 = product_graph(5, 5).unwrap();
    fs::write("fixtures/c5c5.g", c5c5.format()).unwrap();
    let k5: Vec<Vec<u32>> = (0..5u32).map(|v| (0..5u32).filter(|&u| u != v).collect()).collect();
    let k5 = linkring::cosetgraph::Graph::new(k5).unwrap();
    fs::write("fixtures/k5.g", k5.format()).unwrap();
    let gens = product_dihedral_gens(5, 7);
    let body: String = gens.iter().map(|p| format!("{p}\n")).collect();
    fs::write("fixtures/c5c7_dihedral.gens", body).unwrap();
    let gens = product_dihedral_gens(5, 5);
    let body: String = gens.iter().map(|p| format!("{p}\n")).collect();
    fs::write("fixtures/c5c5_dihedral.gens", body).unwrap();
    println!("fixtures written");
}
