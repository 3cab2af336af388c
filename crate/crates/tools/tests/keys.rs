use prc_core::RngStream;
use prc_tools::config::{ParamsFile, SchemeName};
use prc_tools::dynamic::{key_file, load_key_file};
use serde_json::{json, Value};

fn params(scheme: SchemeName, doc: Value) -> ParamsFile {
    ParamsFile::from_value(scheme, doc).unwrap()
}

fn cases() -> Vec<(SchemeName, Value)> {
    vec![
        (SchemeName::Warmup, json!({"n": 128, "tau": 8, "blocks": 4})),
        (
            SchemeName::Hyperloop,
            json!({"n": 256, "m": 1200, "ell": 2, "t": 40}),
        ),
        (
            SchemeName::WeakXor,
            json!({"n": 32, "m": 64, "t": 2, "eta": 0.02}),
        ),
        (
            SchemeName::Ssr,
            json!({"n": 1024, "c": 0.1, "eps": 0.25, "delta": 0.01}),
        ),
        (
            SchemeName::WeakXor,
            json!({"n": 32, "m": 64, "t": 2, "eta": 0.02,
                   "amplify": {"repetitions": 25, "alpha": 0.96, "delta": 0.5}}),
        ),
    ]
}

#[test]
fn key_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (i, (scheme, doc)) in cases().into_iter().enumerate() {
        let p = params(scheme, doc);
        let keyed = p.scheme.keygen(RngStream::new(9, i as u64)).unwrap();
        let path = dir.path().join(format!("key{i}.json"));
        let file = key_file(scheme.as_str(), &p.doc, keyed.as_ref());
        std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
        let loaded = load_key_file(&path).unwrap();
        assert_eq!(loaded.scheme, scheme);
        assert_eq!(loaded.keyed.sk_json(), keyed.sk_json(), "{scheme}");
        assert_eq!(loaded.keyed.pk_json(), keyed.pk_json(), "{scheme}");
        assert_eq!(loaded.keyed.codeword_len(), keyed.codeword_len());
        for j in 0..20 {
            let stream = RngStream::new(10, j);
            let x = keyed.encode(&mut stream.rng());
            assert_eq!(loaded.keyed.encode(&mut stream.rng()), x);
            assert_eq!(loaded.keyed.decode(&x).unwrap(), keyed.decode(&x).unwrap());
        }
    }
}

#[test]
fn damaged_key_files_are_rejected() {
    let p = params(
        SchemeName::WeakXor,
        json!({"n": 32, "m": 64, "t": 2, "eta": 0.02}),
    );
    let keyed = p.scheme.keygen(RngStream::new(1, 1)).unwrap();
    let sk = keyed.sk_json();
    let pk = keyed.pk_json();
    let mut short = pk.clone();
    short["rows"].as_array_mut().unwrap().pop();
    assert!(p.scheme.load_key(&sk, &short).is_err());
    let mut wide = sk.clone();
    wide["support"] = json!([0, 64]);
    assert!(p.scheme.load_key(&wide, &pk).is_err());

    let amp = params(
        SchemeName::WeakXor,
        json!({"n": 32, "m": 64, "t": 2, "eta": 0.02,
               "amplify": {"repetitions": 5, "alpha": 0.96, "delta": 0.5}}),
    );
    let keyed = amp.scheme.keygen(RngStream::new(1, 2)).unwrap();
    let mut sk = keyed.sk_json();
    let pk = keyed.pk_json();
    assert!(amp.scheme.load_key(&sk, &pk).is_ok());
    let perm = sk["perm"].as_array_mut().unwrap();
    perm[1] = perm[0].clone();
    assert!(amp.scheme.load_key(&sk, &pk).is_err());
}

#[test]
fn missing_key_file_is_an_io_error() {
    let err = load_key_file(std::path::Path::new("/nonexistent/key.json"))
        .err()
        .unwrap();
    assert_eq!(err.exit_code(), 3);
}
