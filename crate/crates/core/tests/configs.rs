use std::path::PathBuf;

use rwdre::harness::ExperimentSpec;

fn config_files(dir: PathBuf) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    v.sort();
    v
}

#[test]
fn shipped_configs_parse_and_round_trip() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let mut files = config_files(root.join("../../configs"));
    assert!(files.len() >= 8, "preset configs are present");
    files.extend(config_files(root.join("tests/acceptance")));
    for f in files {
        let spec = ExperimentSpec::from_file(&f).unwrap_or_else(|e| panic!("{}: {e}", f.display()));
        let again = ExperimentSpec::from_toml_str(&spec.to_toml_string().unwrap()).unwrap();
        assert_eq!(again, spec, "{}", f.display());
    }
}
