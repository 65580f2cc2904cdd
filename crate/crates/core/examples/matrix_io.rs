//! Read and write MatrixMarket and CSV matrices.

use laros::io::{format_matrix, parse_matrix, read_matrix, write_matrix, MatrixFormat};

fn main() -> laros::Result<()> {
    let coordinate = "%%MatrixMarket matrix coordinate real symmetric\n3 3 4\n1 1 2.0\n2 1 -1.0\n2 2 2.0\n3 3 1.5\n";
    let a = parse_matrix(coordinate, None)?;
    println!("parsed {:?}", a);

    for format in [MatrixFormat::MatrixmarketArray, MatrixFormat::MatrixmarketCoordinate, MatrixFormat::Csv] {
        println!("--- {format}\n{}", format_matrix(&a, format));
    }

    let path = std::env::temp_dir().join("laros_matrix_io.mtx");
    write_matrix(&path, &a, MatrixFormat::MatrixmarketArray)?;
    let back = read_matrix(&path, None)?;
    println!("round trip exact: {}", back == a);
    std::fs::remove_file(&path).ok();
    Ok(())
}
