//! Inter-annotator agreement between two transcription files.
//!
//! Usage: `cargo run --example agreement -- <reference.tsv> <other.tsv>`;
//! without arguments two small files are written to a temporary directory.

use std::path::PathBuf;

use l2grade::pipeline::cmd_agreement;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    let _dir;
    let (a, b) = if let [a, b] = args.as_slice() {
        (a.clone(), b.clone())
    } else {
        let dir = tempfile::tempdir()?;
        let a = dir.path().join("first.tsv");
        let b = dir.path().join("second.tsv");
        std::fs::write(
            &a,
            "u1\tI like @hes to play football with my friends\n\
             u2\tMy sister is (ten) years old @voices\n\
             u3\tIch wohne in Trento mit @it(la mia) Familie\n",
        )?;
        std::fs::write(
            &b,
            "u1\ti like to play #footbal with friends\n\
             u2\tmy sister is ten years old\n\
             u3\tich wohne in trient mit la mia familie ja\n",
        )?;
        _dir = dir;
        (a, b)
    };
    print!("{}", cmd_agreement(&a, &b)?.to_text());
    Ok(())
}
