//! The on-disk formats: model documents (strict JSON, 1-based indices,
//! unknown keys rejected) and flat weights files, exercised through a
//! write/parse/analyze round trip.
//!
//! Run with: cargo run --example model_files

use relcon::analysis::check_siso;
use relcon::linalg::TolerancePolicy;
use relcon::model::{example_model, ExampleName, ModelDocument};

fn main() -> relcon::Result<()> {
    let tol = TolerancePolicy::default();
    let (model, _) = example_model(ExampleName::Tanks, 3)?;
    let doc = ModelDocument::from_model(&model);
    let text = doc.to_json()?;
    println!("tank model document:\n{text}\n");

    let reparsed = ModelDocument::from_json(&text)?.into_model()?;
    assert_eq!(reparsed, model);
    let report = check_siso(&reparsed.sub, &reparsed.topo, &tol)?;
    println!("round-tripped model verdict: {}", report.verdict);

    // Strict parsing: unknown keys are rejected with a named key, and
    // missing required keys name themselves too.
    let bad = r#"{"n":1,"r":1,"A":[[0.0]],"B":[[1.0]],"C":[[1.0]],
                  "edges":[[1,2]],"drivers":[1],"fashion":"siso","typo_key":1}"#;
    match ModelDocument::from_json(bad) {
        Err(e) => println!("unknown key rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    let missing = r#"{"n":1,"r":1,"A":[[0.0]],"B":[[1.0]],"C":[[1.0]],
                      "drivers":[1],"fashion":"siso"}"#;
    match ModelDocument::from_json(missing) {
        Err(e) => println!("missing key diagnosed: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
