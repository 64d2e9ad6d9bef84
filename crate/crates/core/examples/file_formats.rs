//! Writes a synthetic dataset in both file formats, reads it back, and
//! checks the round trip.
//!
//! cargo run --example file_formats -- [dir]

use std::path::PathBuf;

use hyperattr::dataset::{
    generate_synthetic, load_dataset, read_attribute_matrix, write_attribute_matrix, write_f64_matrix,
    write_labels, Format, SyntheticSpec,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("hyperattr_formats"));
    std::fs::create_dir_all(&dir)?;
    let data = generate_synthetic(&SyntheticSpec::default())?;

    for format in [Format::Csv, Format::Binary] {
        let path = |name: &str| dir.join(format!("{name}.{}", format.extension()));
        write_f64_matrix(path("features"), &data.features.rows().to_owned(), format)?;
        write_labels(path("labels"), data.features.labels(), format)?;
        write_attribute_matrix(path("class_attrs"), &data.class_attrs.values().to_owned(), format)?;
        write_attribute_matrix(path("observed"), &data.observed.values().to_owned(), format)?;

        let (features, class_attrs) = load_dataset(path("features"), path("labels"), path("class_attrs"), format)?;
        let observed = read_attribute_matrix(path("observed"), format)?;
        let size = std::fs::metadata(path("features"))?.len();
        println!(
            "{:<6} features {} bytes; identical after reload: features {}, class attrs {}, observed {}",
            format.extension(),
            size,
            features == data.features,
            class_attrs == data.class_attrs,
            observed == data.observed.values()
        );
    }
    println!("files in {}", dir.display());
    Ok(())
}
