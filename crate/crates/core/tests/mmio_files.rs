use effham::mmio::{read_matrix_market, write_matrix_market};
use effham::HermitianOperator;
use num_complex::Complex64;

#[test]
fn file_round_trip() {
    let op = HermitianOperator::from_triplets(
        3,
        [
            (0, 0, Complex64::new(1.5, 0.0)),
            (1, 0, Complex64::new(0.25, -0.5)),
            (0, 1, Complex64::new(0.25, 0.5)),
            (2, 2, Complex64::new(-3.0, 0.0)),
        ],
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.mtx");
    write_matrix_market(&op, std::fs::File::create(&path).unwrap()).unwrap();
    let back = read_matrix_market(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(back.dim(), 3);
    for r in 0..3 {
        for c in 0..3 {
            assert_eq!(back.get(r, c), op.get(r, c));
        }
    }
}

#[test]
fn real_symmetric_file() {
    let text = "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n1 1 2.0\n2 1 0.5\n";
    let op = read_matrix_market(text.as_bytes()).unwrap();
    assert_eq!(op.get(0, 1), Complex64::new(0.5, 0.0));
    assert_eq!(op.get(1, 1), Complex64::new(0.0, 0.0));
}
