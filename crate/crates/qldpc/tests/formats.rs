use proptest::prelude::*;
use qldpc::formats::{export, import, read_file, write_file, Format, MatrixBundle};
use qldpc_core::sampler::{sample_dual_containing, SamplerConfig};
use qldpc_core::{BitMatrix, BitVector};

const FORMATS: [Format; 3] = [Format::Alist, Format::DenseText, Format::JsonBundle];

fn matrix() -> impl Strategy<Value = BitMatrix> {
    (1usize..6, 1usize..140).prop_flat_map(|(rows, cols)| {
        prop::collection::vec(prop::collection::vec(any::<bool>(), cols), rows).prop_map(move |bits| {
            let rows: Vec<BitVector> = bits.iter().map(|b| BitVector::from_bools(b)).collect();
            BitMatrix::from_rows(cols, &rows).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn every_format_round_trips(h in matrix()) {
        let bundle = MatrixBundle::bare(h.clone());
        for f in FORMATS {
            prop_assert_eq!(&import(&export(&bundle, f), f).unwrap().matrix, &h);
        }
    }

    #[test]
    fn truncation_never_panics(h in matrix(), cut in 0usize..400) {
        let bundle = MatrixBundle::bare(h);
        for f in FORMATS {
            let text = export(&bundle, f);
            let _ = import(&text[..cut.min(text.len())], f);
        }
    }
}

#[test]
fn sampler_output_round_trips_through_files() {
    let res = sample_dual_containing(&SamplerConfig::new(120, 40, 6, 9)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for f in FORMATS {
        let path = dir.path().join(format!("h.{}", f.extension()));
        write_file(&path, &MatrixBundle::bare(res.matrix.clone()), f).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.ends_with('\n'));
        assert_eq!(read_file(&path).unwrap().matrix, res.matrix);
    }
}

#[test]
fn truncated_file_names_the_missing_section() {
    let h: BitMatrix = "1100 0011".parse().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.alist");
    let full = export(&MatrixBundle::bare(h), Format::Alist);
    let head: String = full.lines().take(3).map(|l| format!("{l}\n")).collect();
    std::fs::write(&path, head).unwrap();
    let err = read_file(&path).unwrap_err().to_string();
    assert!(err.contains("row degrees"), "{err}");
    assert!(err.contains("t.alist"), "{err}");
}

#[test]
fn missing_file_is_an_io_error() {
    let err = read_file(std::path::Path::new("/nonexistent/h.alist")).unwrap_err();
    assert!(matches!(err, qldpc::formats::FormatError::Io { .. }));
}
