use pcfex_web::{parse_numbers, statbox_of_text, Scene};

#[test]
fn scene_builds_graphs_with_downsampling_control() {
    let scene = Scene::generate("walk", 600, 4, 1).unwrap();
    assert_eq!(scene.frame_count(), 4);
    assert_eq!(scene.skeleton(0).len(), 17 * 3);
    assert!(scene.skeleton(9).is_empty());
    assert_eq!(Scene::bones().len(), 32);

    let full = scene.build(2, 8, 0, 0.035).unwrap();
    assert_eq!(full.num_nodes(), 600);
    assert_eq!(full.num_edges(), 600 * 8);
    assert_eq!(full.positions().len(), 3 * 600);
    assert_eq!(full.velocities().len(), 600);
    assert_eq!(full.edges().len(), 2 * full.num_edges());
    assert_eq!(full.node_features(0).len(), 19);
    assert!(full.node_features(600).is_empty());
    assert_eq!(full.frame_features().len(), 380);

    let thinned = scene.build(2, 8, 1, 0.035).unwrap();
    assert_eq!(thinned.points_before(), 600);
    assert!(thinned.num_nodes() < 600);
    assert!(thinned.num_edges() < full.num_edges());
}

#[test]
fn bad_requests_are_errors() {
    assert!(Scene::generate("fly", 10, 2, 0).is_err());
    let scene = Scene::generate("stand", 10, 2, 0).unwrap();
    assert!(scene.build(5, 4, 0, 0.035).is_err());
    assert!(scene.build(0, 0, 0, 0.035).is_err());
    assert!(scene.build(0, 4, 1, 0.0).is_err());
}

#[test]
fn statbox_from_text() {
    assert_eq!(parse_numbers("1, 2\n3 4").unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
    let s = statbox_of_text("1 2 3 4").unwrap();
    assert_eq!(s.len(), 10);
    assert_eq!((s[0], s[2], s[3]), (2.5, 2.5, 0.0));
    assert!(statbox_of_text("").is_err());
    assert!(statbox_of_text("1, x").is_err());
    assert!(statbox_of_text("1, inf").is_err());
}
