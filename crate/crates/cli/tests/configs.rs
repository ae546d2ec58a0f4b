use std::fs;
use std::path::{Path, PathBuf};

use mfapc::config::load;
use mfapc_core::presets::{example1_mfac, example1_mfapc, example1_pid, example1_plant};
use mfapc_core::Plant;

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

#[test]
fn bundled_configs_are_canonical() {
    for name in ["example1_mfapc.toml", "example1_mfac.toml", "example1_pid.toml"] {
        let path = bundled(name);
        let text = fs::read_to_string(&path).unwrap();
        let loaded = load(&path).unwrap();
        assert_eq!(loaded.config.to_toml(), text, "{name}");
    }
}

#[test]
fn bundled_configs_encode_the_benchmark_settings() {
    for (name, preset) in [
        ("example1_mfapc.toml", example1_mfapc()),
        ("example1_mfac.toml", example1_mfac()),
        ("example1_pid.toml", example1_pid()),
    ] {
        let loaded = load(&bundled(name)).unwrap();
        let sim = loaded.config.sim_config(loaded.base_dir()).unwrap();
        if matches!(preset.controller, mfapc_core::ControllerSpec::Pid(_)) {
            assert_eq!(sim.controller, preset.controller);
            assert_eq!((sim.reference.clone(), sim.steps, sim.preview), (preset.reference.clone(), preset.steps, preset.preview));
        } else {
            assert_eq!(sim, preset, "{name}");
        }
        let plant = loaded.config.build_plant().unwrap();
        let reference = example1_plant().unwrap();
        assert_eq!(plant.output(), reference.output());
        assert_eq!(plant.past_inputs(), reference.past_inputs());
        assert_eq!(plant.step_index(), reference.step_index());
    }
}
