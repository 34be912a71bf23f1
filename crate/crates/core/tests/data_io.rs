use eeg_lstm::checkpoint::{Checkpoint, Provenance};
use eeg_lstm::data::{gen_synthetic, load_pair_dataset, write_bonn_set, LoadOptions, SetId, SyntheticSpec};
use eeg_lstm::nn::{init_params, ModelConfig, ModelVariant};

#[test]
fn synthetic_export_loads_back() {
    let spec = SyntheticSpec {
        seq_len: 4097,
        ..SyntheticSpec::default()
    };
    let data = gen_synthetic(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let scaled: Vec<Vec<f64>> = data
        .samples
        .iter()
        .map(|s| s.values.iter().map(|v| (v * 100.0).round()).collect())
        .collect();
    write_bonn_set(&dir.path().join("A"), SetId::A, scaled[..100].iter().map(Vec::as_slice)).unwrap();
    write_bonn_set(&dir.path().join("S"), SetId::E, scaled[100..].iter().map(Vec::as_slice)).unwrap();

    let loaded = load_pair_dataset(dir.path(), (SetId::A, SetId::E), &LoadOptions::default()).unwrap();
    assert_eq!(loaded.name, "A/E");
    assert_eq!(loaded.len(), 200);
    assert_eq!(loaded.seq_len(), 4097);
    for (got, want) in loaded.samples.iter().zip(&scaled) {
        assert_eq!(&got.values, want);
    }
    assert_eq!(loaded.labels().iter().filter(|&&y| y == 1).count(), 100);
    assert_eq!(loaded.truncated(4096).unwrap().seq_len(), 4096);
}

#[test]
fn checkpoint_file_round_trip() {
    let config = ModelConfig::scaled(ModelVariant::Model2, 5, 30);
    let model = init_params::<f32>(&config, 3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let provenance = Provenance {
        seed: 3,
        epoch: 7,
        val_accuracy: 0.925,
    };
    Checkpoint::from_model(&model, true, provenance.clone())
        .save(&path)
        .unwrap();

    let ckpt = Checkpoint::load(&path).unwrap();
    assert_eq!(ckpt.provenance, provenance);
    assert!(ckpt.standardize);
    let back = ckpt.to_model::<f32>(Some(&config)).unwrap();
    let bits = |m: &eeg_lstm::nn::Model<f32>| m.params().flatten().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&model), bits(&back));

    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, &text[..text.len() - 40]).unwrap();
    assert!(Checkpoint::load(&path).is_err());
}
