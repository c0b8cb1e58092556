mod common;

use common::*;
use uhgraph::uh::is_ultrahomogeneous;

#[test]
fn blocks_of_uh_graphs_induce_uh_graphs() {
    blocks_induce_uh(&mut runner(48)).unwrap();
}

#[test]
fn disjoint_unions_are_uh_iff_both_parts_are() {
    disjoint_union_law(&mut runner(96)).unwrap();
}

#[test]
fn color_moves_keep_automorphisms() {
    moves_preserve_aut(&mut runner(96)).unwrap();
}

#[test]
fn easygoing_blow_ups_transfer_uh() {
    blow_up_transfer(&mut runner(64)).unwrap();
}

#[test]
fn wreath_products_multiply_orders() {
    wreath_order_law(&mut runner(96)).unwrap();
}

#[test]
fn mixed_composite_is_uh() {
    let g = mixed_composite();
    assert_eq!(g.n(), 29);
    assert_eq!(g.num_vcolors(), 8);
    assert!(is_ultrahomogeneous(&g).unwrap().is_uh);
}

#[test]
fn every_listed_spec_up_to_ten_vertices_is_uh() {
    let specs = uhgraph::families::enumerate_specs(10).unwrap();
    let blown = specs.iter().filter(|s| s.to_string().contains("blow=")).count();
    assert!(blown > 20, "{blown}");
    for s in &specs {
        let g = uhgraph::families::gen(s).unwrap();
        assert!(is_uh(&g), "{s}");
    }
}
