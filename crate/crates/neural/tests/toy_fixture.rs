//! The serialized toy network ships in `fixtures/` so downstream tooling
//! can exercise checkpoint loading without training anything.

use std::path::PathBuf;

use neural::{load_checkpoint, save_checkpoint, toy_dnn, Checkpoint, CheckpointMeta};

fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/toy_dnn.ckpt")
}

#[test]
fn shipped_toy_fixture_loads_and_computes_the_worked_examples() {
    let ckpt = load_checkpoint(&fixture_path()).unwrap();
    let net = ckpt.policy().unwrap();
    assert_eq!(net.forward(&[1.0, -1.0]).unwrap(), vec![2.0]);
    assert_eq!(net.forward(&[2.0, 3.0]).unwrap(), vec![48.0]);
    assert_eq!(ckpt.meta.mode, "fixture");
}

/// Regenerates the fixture in place. Run with
/// `cargo test -p neural -- --ignored regenerate`.
#[test]
#[ignore = "writes into the source tree"]
fn regenerate_toy_fixture() {
    let ckpt = Checkpoint {
        meta: CheckpointMeta {
            mode: "fixture".into(),
            ..CheckpointMeta::default()
        },
        nets: vec![("policy".into(), toy_dnn())],
    };
    std::fs::create_dir_all(fixture_path().parent().unwrap()).unwrap();
    save_checkpoint(&fixture_path(), &ckpt).unwrap();
}
